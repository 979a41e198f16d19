#include "gridsiter/screening.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "gridsiter/case_io.hpp"
#include "gridsiter/hashing.hpp"
#include "gridsiter/pwl.hpp"

namespace gridsiter {

std::string case_fingerprint(const GridCase& grid) { return sha256_hex(case_to_json(grid.data(), -1)); }

ContingencyLibrary build_contingency_library(const GridCase& grid) {
    ContingencyLibrary lib;
    const std::set<int> bridges = island_forming_branches(grid);
    for (const Branch& br : grid.branches())
        if (br.in_service && bridges.count(br.id) == 0) lib.items.push_back({ContingencyKind::Branch, br.id});
    for (const Generator& g : grid.generators()) lib.items.push_back({ContingencyKind::Generator, g.id});
    std::string text = case_fingerprint(grid);
    for (const Contingency& c : lib.items) text += "\n" + c.label();
    lib.fingerprint = sha256_hex(text);
    return lib;
}

std::vector<int> candidate_set(const GridCase& grid, double vmin_kv, double vmax_kv) {
    if (!(vmin_kv < vmax_kv)) throw std::invalid_argument("voltage band needs vmin < vmax");
    std::vector<int> out;
    for (const Bus& b : grid.buses())
        if (b.base_kv > vmin_kv && b.base_kv < vmax_kv) out.push_back(b.id);
    return out;
}

OpfOutcome dcopf_feasibility(const CaseView& view, const PtdfMatrix& ptdf, int hour,
                             const std::vector<ExtraLoad>& extra, const OpfOptions& options) {
    const GridCase& grid = view.grid();
    const std::size_t nb = grid.num_buses();
    std::vector<double> demand(nb);
    double total = 0.0;
    for (std::size_t n = 0; n < nb; ++n) demand[n] = grid.demand(n, hour);
    for (const ExtraLoad& e : extra) demand[grid.bus_index(e.bus_id)] += e.mw;
    for (double d : demand) total += d;

    opt::LinearProgram lp;
    // Generation per unit as the sum of its cost segments.
    std::vector<std::vector<int>> segs(grid.num_generators());
    std::vector<opt::Term> balance;
    for (std::size_t g = 0; g < grid.num_generators(); ++g) {
        const Generator& gen = grid.generators()[g];
        const double cap = view.generator_pmax(g, hour);
        if (cap <= 0.0) continue;
        for (const CostSegment& s : linearize(gen.cost, 0.0, gen.pmax)) {
            const int v = lp.add_variable(0.0, s.width, s.slope);
            segs[g].push_back(v);
            balance.push_back({v, 1.0});
        }
        if (cap < gen.pmax) {
            std::vector<opt::Term> row;
            for (int v : segs[g]) row.push_back({v, 1.0});
            lp.add_constraint(row, opt::Sense::LessEqual, cap);
        }
    }
    lp.add_constraint(balance, opt::Sense::Equal, total, "balance");

    std::vector<int> slacks;
    std::vector<opt::Term> row;
    for (std::size_t k = 0; k < grid.num_branches(); ++k) {
        if (!view.branch_in_service(k)) continue;
        const auto kr = static_cast<Eigen::Index>(k);
        row.clear();
        double load_flow = 0.0;
        for (std::size_t n = 0; n < nb; ++n) load_flow += ptdf.values(kr, static_cast<Eigen::Index>(n)) * demand[n];
        for (std::size_t g = 0; g < grid.num_generators(); ++g) {
            const double a = ptdf.values(kr, static_cast<Eigen::Index>(grid.generator_bus_index(g)));
            if (std::abs(a) < 1e-12) continue;
            for (int v : segs[g]) row.push_back({v, a});
        }
        const double limit = grid.branches()[k].flow_limit;
        const int up = lp.add_variable(0.0, opt::kInfinity, options.slack_penalty);
        const int dn = lp.add_variable(0.0, opt::kInfinity, options.slack_penalty);
        slacks.push_back(up);
        slacks.push_back(dn);
        row.push_back({up, -1.0});
        lp.add_constraint(row, opt::Sense::LessEqual, limit + load_flow);
        row.back() = {dn, 1.0};
        lp.add_constraint(row, opt::Sense::GreaterEqual, -limit + load_flow);
    }

    const opt::Solution sol = opt::solve_lp(lp, options.solver);
    OpfOutcome out;
    out.status = sol.status;
    if (!sol.optimal()) return out;
    out.objective = sol.objective;
    for (int v : slacks) out.max_slack = std::max(out.max_slack, sol.x[static_cast<std::size_t>(v)]);
    out.delta = out.max_slack <= options.slack_tolerance ? 1 : 0;
    return out;
}

OpfOutcome dcopf_feasibility(const CaseView& view, int hour, const std::vector<ExtraLoad>& extra,
                             const OpfOptions& options) {
    return dcopf_feasibility(view, build_ptdf(view), hour, extra, options);
}

Screener::Screener(const GridCase& grid, ContingencyLibrary library, OpfOptions options)
    : grid_(&grid), library_(std::move(library)), options_(options) {
    for (const Contingency& c : library_.items) {
        views_.push_back(apply_contingency(grid, c));
        ptdfs_.push_back(build_ptdf(views_.back()));
    }
}

OpfOutcome Screener::cell(int bus, double load_mw, int hour, std::size_t contingency) const {
    return dcopf_feasibility(views_.at(contingency), ptdfs_.at(contingency), hour, {{bus, load_mw}}, options_);
}

PassRateRecord Screener::pass_rate(int bus, const LoadTrajectory& traj, const std::vector<int>& hours) const {
    if (library_.items.empty()) throw std::invalid_argument("contingency library is empty");
    if (hours.empty()) throw std::invalid_argument("hour sample is empty");
    if (!grid_->has_bus(bus)) throw std::invalid_argument(fmt::format("unknown bus {}", bus));
    PassRateRecord rec;
    rec.bus = bus;
    rec.envelope = traj.source.id;
    rec.library_fingerprint = library_.fingerprint;
    rec.hours = hours;
    rec.bitmap.reserve(hours.size() * library_.size());
    for (int h : hours) {
        if (h < 0 || h >= grid_->horizon()) throw std::invalid_argument(fmt::format("hour {} outside the horizon", h));
        const double load = traj.at(1 + h % 24);
        for (std::size_t c = 0; c < library_.size(); ++c) {
            const OpfOutcome o = cell(bus, load, h, c);
            if (o.status == opt::Status::IterationLimit) {
                ++rec.iteration_limits;
                spdlog::warn("stage1: iteration limit at bus {} envelope {} hour {} outage {} (counted infeasible)", bus,
                             rec.envelope, h, library_.items[c].label());
            }
            rec.bitmap.push_back(static_cast<std::uint8_t>(o.delta));
            rec.feasible += o.delta;
        }
    }
    rec.total = static_cast<long>(rec.bitmap.size());
    return rec;
}

bool QualifiedSet::contains(int bus, const std::string& envelope) const {
    return std::find(members.begin(), members.end(), std::make_pair(bus, envelope)) != members.end();
}

std::vector<int> QualifiedSet::buses(const std::string& envelope) const {
    std::vector<int> out;
    for (const auto& [b, e] : members)
        if (e == envelope) out.push_back(b);
    return out;
}

QualifiedSet stage1_gate(const std::vector<PassRateRecord>& records, double tau) {
    QualifiedSet q;
    q.threshold = tau;
    for (const PassRateRecord& r : records) {
        if (r.library_fingerprint != records.front().library_fingerprint)
            throw std::invalid_argument("pass-rate records were computed against different contingency libraries");
        q.counts.try_emplace(r.envelope, 0);
        if (r.total > 0 && r.pass_rate() >= tau) {
            q.members.emplace_back(r.bus, r.envelope);
            ++q.counts[r.envelope];
        }
    }
    return q;
}

}  // namespace gridsiter
