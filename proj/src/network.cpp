#include "gridsiter/network.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace gridsiter {

std::string Contingency::label() const {
    return fmt::format("{}:{}", kind == ContingencyKind::Branch ? "branch" : "gen", element_id);
}

bool CaseView::branch_in_service(std::size_t k) const {
    if (!grid_->branches()[k].in_service) return false;
    return !(outage_ && outage_->kind == ContingencyKind::Branch && outage_pos_ == k);
}

bool CaseView::generator_available(std::size_t g) const {
    return !(outage_ && outage_->kind == ContingencyKind::Generator && outage_pos_ == g);
}

double CaseView::generator_pmax(std::size_t g, int t) const {
    return generator_available(g) ? grid_->generator_pmax(g, t) : 0.0;
}

namespace {

// Slack-reduced factorization shared by B and PTDF construction.
struct ReducedSystem {
    Eigen::MatrixXd b_full;
    std::vector<std::size_t> keep;  // bus positions other than the slack
    Eigen::FullPivLU<Eigen::MatrixXd> lu;
};

ReducedSystem factor_reduced(const CaseView& view, std::size_t slack) {
    ReducedSystem sys;
    sys.b_full = build_b_matrix(view);
    const std::size_t n = view.grid().num_buses();
    for (std::size_t i = 0; i < n; ++i)
        if (i != slack) sys.keep.push_back(i);
    Eigen::MatrixXd reduced(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n - 1));
    for (std::size_t r = 0; r < sys.keep.size(); ++r)
        for (std::size_t c = 0; c < sys.keep.size(); ++c)
            reduced(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = sys.b_full(
                static_cast<Eigen::Index>(sys.keep[r]), static_cast<Eigen::Index>(sys.keep[c]));
    sys.lu.compute(reduced);
    if (n > 1 && !sys.lu.isInvertible()) throw GridError("islanded or degenerate network");
    return sys;
}

}  // namespace

Eigen::MatrixXd build_b_matrix(const CaseView& view) {
    const GridCase& grid = view.grid();
    const auto n = static_cast<Eigen::Index>(grid.num_buses());
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < grid.num_branches(); ++k) {
        if (!view.branch_in_service(k)) continue;
        const Branch& br = grid.branches()[k];
        const auto i = static_cast<Eigen::Index>(grid.bus_index(br.from_bus));
        const auto j = static_cast<Eigen::Index>(grid.bus_index(br.to_bus));
        b(i, i) += br.susceptance;
        b(j, j) += br.susceptance;
        b(i, j) -= br.susceptance;
        b(j, i) -= br.susceptance;
    }
    if (n > 1) {
        // Reduced matrix must be invertible; rank check on the full matrix
        // (rank n-1 for a connected network) is equivalent and slack-agnostic.
        Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
        lu.setThreshold(1e-10);
        if (lu.rank() != n - 1) throw GridError("islanded or degenerate network");
    }
    return b;
}

PtdfMatrix build_ptdf(const CaseView& view, int slack_bus_id) {
    const GridCase& grid = view.grid();
    const std::size_t slack = grid.bus_index(slack_bus_id);
    const std::size_t n = grid.num_buses();
    const std::size_t m = grid.num_branches();

    PtdfMatrix out;
    out.slack_index = slack;
    out.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    if (n < 2) return out;

    ReducedSystem sys = factor_reduced(view, slack);
    // X = B_red^{-1}; theta_red = X * p_red (per unit injections).
    const Eigen::MatrixXd x = sys.lu.inverse();
    // Reduced position of each bus; the slack has no row (its angle is zero).
    std::vector<Eigen::Index> reduced_pos(n, -1);
    for (std::size_t r = 0; r < sys.keep.size(); ++r) reduced_pos[sys.keep[r]] = static_cast<Eigen::Index>(r);

    const auto nr = static_cast<Eigen::Index>(sys.keep.size());
    for (std::size_t k = 0; k < m; ++k) {
        if (!view.branch_in_service(k)) continue;
        const Branch& br = grid.branches()[k];
        Eigen::RowVectorXd dtheta = Eigen::RowVectorXd::Zero(nr);
        const Eigen::Index f = reduced_pos[grid.bus_index(br.from_bus)];
        const Eigen::Index t = reduced_pos[grid.bus_index(br.to_bus)];
        if (f >= 0) dtheta += x.row(f);
        if (t >= 0) dtheta -= x.row(t);
        for (Eigen::Index c = 0; c < nr; ++c)
            out.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(sys.keep[static_cast<std::size_t>(c)])) =
                br.susceptance * dtheta(c);
    }
    return out;
}

Eigen::VectorXd solve_dc_flows(const CaseView& view, const Eigen::VectorXd& injection, int slack_bus_id) {
    const GridCase& grid = view.grid();
    const std::size_t slack = grid.bus_index(slack_bus_id);
    const std::size_t n = grid.num_buses();
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    if (n > 1) {
        ReducedSystem sys = factor_reduced(view, slack);
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(sys.keep.size()));
        for (std::size_t r = 0; r < sys.keep.size(); ++r)
            rhs(static_cast<Eigen::Index>(r)) = injection(static_cast<Eigen::Index>(sys.keep[r])) / grid.base_mva();
        const Eigen::VectorXd reduced = sys.lu.solve(rhs);
        for (std::size_t r = 0; r < sys.keep.size(); ++r)
            theta(static_cast<Eigen::Index>(sys.keep[r])) = reduced(static_cast<Eigen::Index>(r));
    }
    Eigen::VectorXd flows = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.num_branches()));
    for (std::size_t k = 0; k < grid.num_branches(); ++k) {
        if (!view.branch_in_service(k)) continue;
        const Branch& br = grid.branches()[k];
        const auto f = static_cast<Eigen::Index>(grid.bus_index(br.from_bus));
        const auto t = static_cast<Eigen::Index>(grid.bus_index(br.to_bus));
        flows(static_cast<Eigen::Index>(k)) = grid.base_mva() * br.susceptance * (theta(f) - theta(t));
    }
    return flows;
}

std::set<int> island_forming_branches(const CaseView& view) {
    const GridCase& grid = view.grid();
    const std::size_t n = grid.num_buses();
    struct Edge {
        std::size_t to;
        std::size_t branch;
    };
    std::vector<std::vector<Edge>> adj(n);
    for (std::size_t k = 0; k < grid.num_branches(); ++k) {
        if (!view.branch_in_service(k)) continue;
        const Branch& br = grid.branches()[k];
        const std::size_t a = grid.bus_index(br.from_bus);
        const std::size_t b = grid.bus_index(br.to_bus);
        adj[a].push_back({b, k});
        adj[b].push_back({a, k});
    }

    // Iterative Tarjan low-link; skipping the parent *edge* (not vertex) keeps
    // parallel branches out of the bridge set.
    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> order(n, unvisited), low(n, 0);
    std::set<int> bridges;
    std::size_t counter = 0;
    struct Frame {
        std::size_t node;
        std::size_t via_branch;
        std::size_t next_edge;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (order[root] != unvisited) continue;
        std::vector<Frame> stack{{root, unvisited, 0}};
        order[root] = low[root] = counter++;
        while (!stack.empty()) {
            Frame& top = stack.back();
            if (top.next_edge < adj[top.node].size()) {
                const Edge e = adj[top.node][top.next_edge++];
                if (e.branch == top.via_branch) continue;
                if (order[e.to] == unvisited) {
                    order[e.to] = low[e.to] = counter++;
                    stack.push_back({e.to, e.branch, 0});
                } else {
                    low[top.node] = std::min(low[top.node], order[e.to]);
                }
            } else {
                const Frame done = top;
                stack.pop_back();
                if (!stack.empty()) {
                    Frame& parent = stack.back();
                    low[parent.node] = std::min(low[parent.node], low[done.node]);
                    if (low[done.node] > order[parent.node]) bridges.insert(grid.branches()[done.via_branch].id);
                }
            }
        }
    }
    return bridges;
}

CaseView apply_contingency(const GridCase& grid, const Contingency& c) {
    if (c.kind == ContingencyKind::Generator) {
        return CaseView(grid, c, grid.generator_index(c.element_id));
    }
    const std::size_t k = grid.branch_index(c.element_id);
    if (!grid.branches()[k].in_service)
        throw GridError(fmt::format("branch {} is already out of service", c.element_id));
    if (island_forming_branches(grid).count(c.element_id) != 0)
        throw GridError(fmt::format("branch {} is island-forming; outage rejected", c.element_id));
    return CaseView(grid, c, k);
}

}  // namespace gridsiter
