#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "simplex.hpp"

namespace gridsiter::opt {

namespace {

enum class Fix : std::uint8_t { Free, Zero, One };

struct Node {
    double bound = -kInfinity;
    long seq = 0;
    std::vector<Fix> fixes;  // per entry of mip.binaries()
    std::shared_ptr<const detail::Basis> basis;
};

// Best-bound selection once an incumbent exists; depth-first (newest node)
// before that. Ties resolve by creation order for determinism.
std::size_t select_node(const std::vector<Node>& open, bool have_incumbent) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < open.size(); ++i) {
        if (!have_incumbent) {
            if (open[i].seq > open[best].seq) best = i;
        } else if (open[i].bound < open[best].bound ||
                   (open[i].bound == open[best].bound && open[i].seq < open[best].seq)) {
            best = i;
        }
    }
    return best;
}

}  // namespace

Solution detail_solve_milp(const MixedIntegerProgram& mip, const SolverOptions& options) {
    mip.validate();
    const LinearProgram& lp = mip.lp;
    const std::vector<int>& bins = mip.binaries();
    const std::vector<int>& prio = mip.priorities();
    if (bins.empty()) return detail_solve_lp(lp, options);

    const Tolerances& tol = options.tol;
    detail::SimplexEngine engine(lp, tol);

    std::vector<Node> open;
    open.push_back(Node{-kInfinity, 0, std::vector<Fix>(bins.size(), Fix::Free), nullptr});
    long next_seq = 1;

    bool have_incumbent = false;
    double incumbent = kInfinity;
    std::vector<Fix> incumbent_fixes;
    long nodes = 0, iterations = 0;
    bool limit_hit = false, lp_trouble = false, root = true;

    auto set_fixes = [&](const std::vector<Fix>& fixes) {
        for (std::size_t b = 0; b < bins.size(); ++b) {
            const int v = bins[b];
            double lo = lp.lower(v), hi = lp.upper(v);
            if (fixes[b] == Fix::Zero) hi = 0.0;
            if (fixes[b] == Fix::One) lo = 1.0;
            engine.set_structural_bounds(v, lo, hi);
        }
    };
    auto cutoff = [&] { return incumbent - std::max(tol.gap_absolute, tol.gap_relative * std::abs(incumbent)); };

    while (!open.empty()) {
        const std::size_t pick = select_node(open, have_incumbent);
        Node node = std::move(open[pick]);
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
        if (have_incumbent && node.bound >= cutoff()) continue;
        if (nodes >= options.max_nodes) {
            limit_hit = true;
            break;
        }
        ++nodes;

        set_fixes(node.fixes);
        const Status st = engine.solve(options.max_iterations, node.basis.get());
        iterations += engine.iterations();
        if (st == Status::Unbounded && root) {
            Solution out;
            out.status = Status::Unbounded;
            out.iterations = iterations;
            out.nodes = nodes;
            return out;
        }
        root = false;
        if (st == Status::IterationLimit) lp_trouble = true;
        if (st != Status::Optimal) continue;

        const double obj = engine.objective();
        if (have_incumbent && obj >= cutoff()) continue;

        const std::vector<double> x = engine.structural_values();
        int branch = -1;
        double most = tol.integrality;
        for (std::size_t b = 0; b < bins.size(); ++b) {
            const double v = x[static_cast<std::size_t>(bins[b])];
            const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
            if (frac <= tol.integrality) continue;
            const bool higher = branch >= 0 && prio[b] > prio[static_cast<std::size_t>(branch)];
            const bool same = branch < 0 || prio[b] == prio[static_cast<std::size_t>(branch)];
            if (higher || (same && frac > most)) {
                most = frac;
                branch = static_cast<int>(b);
            }
        }
        if (branch < 0) {
            have_incumbent = true;
            incumbent = obj;
            incumbent_fixes = node.fixes;
            for (std::size_t b = 0; b < bins.size(); ++b)
                incumbent_fixes[b] = x[static_cast<std::size_t>(bins[b])] > 0.5 ? Fix::One : Fix::Zero;
            continue;
        }

        auto basis = std::make_shared<const detail::Basis>(engine.basis());
        if (!have_incumbent && nodes == 1) {
            // Rounding the top-priority binaries up often yields a feasible
            // schedule straight away.
            const int top = *std::max_element(prio.begin(), prio.end());
            std::vector<Fix> trial = node.fixes;
            for (std::size_t b = 0; b < bins.size(); ++b) {
                if (prio[b] != top || trial[b] != Fix::Free) continue;
                trial[b] = x[static_cast<std::size_t>(bins[b])] > tol.integrality ? Fix::One : Fix::Zero;
            }
            set_fixes(trial);
            if (engine.solve(options.max_iterations, basis.get()) == Status::Optimal) {
                iterations += engine.iterations();
                const std::vector<double> xr = engine.structural_values();
                bool integral = true;
                for (std::size_t b = 0; b < bins.size() && integral; ++b) {
                    const double v = xr[static_cast<std::size_t>(bins[b])];
                    integral = std::min(v - std::floor(v), std::ceil(v) - v) <= tol.integrality;
                }
                if (integral) {
                    have_incumbent = true;
                    incumbent = engine.objective();
                    incumbent_fixes = trial;
                    for (std::size_t b = 0; b < bins.size(); ++b)
                        incumbent_fixes[b] = xr[static_cast<std::size_t>(bins[b])] > 0.5 ? Fix::One : Fix::Zero;
                    if (obj >= cutoff()) continue;
                }
            }
        }
        const double v = x[static_cast<std::size_t>(bins[static_cast<std::size_t>(branch)])];
        // The child matching the rounded value is created last so the dive visits it first.
        const Fix first = v >= 0.5 ? Fix::Zero : Fix::One;
        const Fix second = v >= 0.5 ? Fix::One : Fix::Zero;
        for (Fix f : {first, second}) {
            Node child{obj, next_seq++, node.fixes, basis};
            child.fixes[static_cast<std::size_t>(branch)] = f;
            open.push_back(std::move(child));
        }
    }

    Solution out;
    out.nodes = nodes;
    if (!have_incumbent) {
        out.status = limit_hit ? Status::NodeLimit : (lp_trouble ? Status::IterationLimit : Status::Infeasible);
        out.iterations = iterations;
        return out;
    }

    // Duals at the incumbent: the LP with every binary fixed.
    LinearProgram fixed = lp;
    for (std::size_t b = 0; b < bins.size(); ++b) {
        const double val = incumbent_fixes[b] == Fix::One ? 1.0 : 0.0;
        fixed.set_bounds(bins[b], val, val);
    }
    out = detail_solve_lp(fixed, options);
    out.iterations += iterations;
    out.nodes = nodes;
    if (out.status == Status::Optimal && limit_hit) out.status = Status::NodeLimit;
    return out;
}

}  // namespace gridsiter::opt
