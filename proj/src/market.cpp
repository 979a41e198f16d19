#include "gridsiter/market.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "gridsiter/pwl.hpp"

namespace gridsiter {

DemandOverlay::DemandOverlay(const GridCase& grid, int bus_id, LoadTrajectory traj)
    : grid_(&grid), bus_(bus_id), bus_pos_(grid.bus_index(bus_id)), traj_(std::move(traj)) {}

double DemandOverlay::demand(std::size_t n, int t) const {
    double d = grid_->demand(n, t);
    if (traj_ && n == bus_pos_) d += traj_->at(1 + t % 24);
    return d;
}

double DemandOverlay::total_demand(int t) const {
    double d = grid_->total_demand(t);
    if (traj_) d += traj_->at(1 + t % 24);
    return d;
}

DemandOverlay insert_load(const GridCase& grid, int bus_id, const LoadTrajectory& traj) {
    return DemandOverlay(grid, bus_id, traj);
}

std::vector<UnitState> initial_unit_states(const GridCase& grid) {
    return std::vector<UnitState>(grid.num_generators());
}

namespace {

// Units without commitment economics stay online; their binaries would only
// add symmetric branching.
bool always_on(const Generator& g) {
    return g.pmin == 0.0 && g.no_load_cost == 0.0 && g.startup_cost == 0.0 && g.shutdown_cost == 0.0 &&
           g.min_up <= 1 && g.min_down <= 1 && g.cost.c0 == 0.0;
}

double startup_ramp(const Generator& g) { return std::max(g.pmin, g.ramp_up); }
double shutdown_ramp(const Generator& g) { return std::max(g.pmin, g.ramp_down); }

struct UnitColumns {
    bool fixed_on = false;
    std::vector<int> u, y, z;
    std::vector<std::vector<int>> seg;  // [hour][segment]
};

// Terms of p_{g,t} = pmin u + Σ seg, scaled by `sign`; the pmin part of a
// fixed-on unit is zero since its segments start at 0.
void add_output_terms(std::vector<opt::Term>& row, const UnitColumns& uc, const Generator& g, int t, double sign) {
    if (!uc.fixed_on && g.pmin != 0.0) row.push_back({uc.u[static_cast<std::size_t>(t)], sign * g.pmin});
    for (int v : uc.seg[static_cast<std::size_t>(t)]) row.push_back({v, sign});
}

}  // namespace

ScucDay run_scuc(const DemandOverlay& demand, int day, const std::vector<UnitState>& start,
                 const MarketOptions& options, std::set<int>* active_lines) {
    const GridCase& grid = demand.grid();
    const int T = 24;
    const int h0 = day * 24;
    if (h0 < 0 || h0 + T > grid.horizon()) throw std::invalid_argument(fmt::format("day {} outside the horizon", day));
    const std::size_t G = grid.num_generators();
    if (start.size() != G) throw std::invalid_argument("initial unit state size mismatch");

    opt::MixedIntegerProgram mip;
    opt::LinearProgram& lp = mip.lp;
    std::vector<UnitColumns> cols(G);
    double constant = 0.0;

    for (std::size_t g = 0; g < G; ++g) {
        const Generator& gen = grid.generators()[g];
        UnitColumns& uc = cols[g];
        uc.fixed_on = always_on(gen);
        const double lo = uc.fixed_on ? 0.0 : gen.pmin;
        const auto segments = linearize(gen.cost, lo, gen.pmax, options.cost_segments);
        const double u_prev = start[g].on ? 1.0 : 0.0;
        for (int t = 0; t < T; ++t) {
            const double cap = grid.generator_pmax(g, h0 + t);
            std::vector<int> seg;
            for (const CostSegment& s : segments) seg.push_back(lp.add_variable(0.0, s.width, s.slope));
            uc.seg.push_back(seg);
            if (uc.fixed_on) {
                constant += gen.cost(0.0);
                if (cap < gen.pmax) {
                    std::vector<opt::Term> row;
                    for (int v : seg) row.push_back({v, 1.0});
                    lp.add_constraint(row, opt::Sense::LessEqual, std::max(0.0, cap));
                }
                continue;
            }
            double u_lo = 0.0, u_hi = 1.0;
            if (cap < gen.pmin - 1e-9) u_hi = 0.0;
            if (start[g].on && start[g].hours_in_state < gen.min_up && t < gen.min_up - start[g].hours_in_state)
                u_lo = 1.0;
            if (!start[g].on && start[g].hours_in_state < gen.min_down && t < gen.min_down - start[g].hours_in_state)
                u_hi = 0.0;
            if (u_lo > u_hi) u_lo = u_hi;  // capacity loss overrides a carried obligation
            const int u = lp.add_variable(u_lo, u_hi, gen.cost(gen.pmin) + gen.no_load_cost);
            const int y = lp.add_variable(0.0, 1.0, gen.startup_cost);
            const int z = lp.add_variable(0.0, 1.0, gen.shutdown_cost);
            mip.mark_binary(u, 1);
            mip.mark_binary(y);
            mip.mark_binary(z);
            uc.u.push_back(u);
            uc.y.push_back(y);
            uc.z.push_back(z);

            std::vector<opt::Term> row;
            for (int v : seg) row.push_back({v, 1.0});
            row.push_back({u, -std::max(0.0, std::min(cap, gen.pmax) - gen.pmin)});
            lp.add_constraint(row, opt::Sense::LessEqual, 0.0);

            if (t == 0)
                lp.add_constraint({{y, 1.0}, {z, -1.0}, {u, -1.0}}, opt::Sense::Equal, -u_prev);
            else
                lp.add_constraint({{y, 1.0}, {z, -1.0}, {u, -1.0}, {uc.u[static_cast<std::size_t>(t - 1)], 1.0}},
                                  opt::Sense::Equal, 0.0);
            lp.add_constraint({{y, 1.0}, {z, 1.0}}, opt::Sense::LessEqual, 1.0);
        }

        // Ramping; redundant when a unit can traverse its whole range in an hour.
        const bool ramp_up_binds = gen.ramp_up < gen.pmax;
        const bool ramp_dn_binds = gen.ramp_down < gen.pmax;
        for (int t = 0; t < T; ++t) {
            const bool have_prev = t > 0 || start[g].output.has_value();
            if (!have_prev) continue;
            const double p_prev = t == 0 ? *start[g].output : 0.0;
            if (ramp_up_binds) {
                std::vector<opt::Term> row;
                double rhs = 0.0;
                add_output_terms(row, uc, gen, t, 1.0);
                if (t > 0) {
                    add_output_terms(row, uc, gen, t - 1, -1.0);
                    if (!uc.fixed_on) row.push_back({uc.u[static_cast<std::size_t>(t - 1)], -gen.ramp_up});
                } else {
                    rhs += p_prev + (uc.fixed_on ? 0.0 : gen.ramp_up * u_prev);
                }
                if (uc.fixed_on)
                    rhs += gen.ramp_up;
                else
                    row.push_back({uc.y[static_cast<std::size_t>(t)], -startup_ramp(gen)});
                lp.add_constraint(row, opt::Sense::LessEqual, rhs);
            }
            if (ramp_dn_binds) {
                std::vector<opt::Term> row;
                double rhs = 0.0;
                add_output_terms(row, uc, gen, t, -1.0);
                if (t > 0)
                    add_output_terms(row, uc, gen, t - 1, 1.0);
                else
                    rhs -= p_prev;
                if (uc.fixed_on) {
                    rhs += gen.ramp_down;
                } else {
                    row.push_back({uc.u[static_cast<std::size_t>(t)], -gen.ramp_down});
                    row.push_back({uc.z[static_cast<std::size_t>(t)], -shutdown_ramp(gen)});
                }
                lp.add_constraint(row, opt::Sense::LessEqual, rhs);
            }
        }

        if (!uc.fixed_on) {
            for (int t = 0; t < T; ++t) {
                if (gen.min_up > 1) {
                    std::vector<opt::Term> row;
                    for (int s = std::max(0, t - gen.min_up + 1); s <= t; ++s)
                        row.push_back({uc.y[static_cast<std::size_t>(s)], 1.0});
                    row.push_back({uc.u[static_cast<std::size_t>(t)], -1.0});
                    lp.add_constraint(row, opt::Sense::LessEqual, 0.0);
                }
                if (gen.min_down > 1) {
                    std::vector<opt::Term> row;
                    for (int s = std::max(0, t - gen.min_down + 1); s <= t; ++s)
                        row.push_back({uc.z[static_cast<std::size_t>(s)], 1.0});
                    row.push_back({uc.u[static_cast<std::size_t>(t)], 1.0});
                    lp.add_constraint(row, opt::Sense::LessEqual, 1.0);
                }
            }
        }
    }
    lp.set_objective_offset(constant);

    for (int t = 0; t < T; ++t) {
        std::vector<opt::Term> balance;
        for (std::size_t g = 0; g < G; ++g) add_output_terms(balance, cols[g], grid.generators()[g], t, 1.0);
        lp.add_constraint(balance, opt::Sense::Equal, demand.total_demand(h0 + t));
        if (options.reserve_fraction > 0.0) {
            std::vector<opt::Term> row;
            double rhs = options.reserve_fraction * demand.total_demand(h0 + t);
            for (std::size_t g = 0; g < G; ++g) {
                const Generator& gen = grid.generators()[g];
                const UnitColumns& uc = cols[g];
                const double cap = std::min(grid.generator_pmax(g, h0 + t), gen.pmax);
                for (int v : uc.seg[static_cast<std::size_t>(t)]) row.push_back({v, -1.0});
                if (uc.fixed_on)
                    rhs -= std::max(0.0, cap);
                else
                    row.push_back({uc.u[static_cast<std::size_t>(t)], std::max(0.0, cap - gen.pmin)});
            }
            lp.add_constraint(row, opt::Sense::GreaterEqual, rhs);
        }
    }

    const PtdfMatrix ptdf = build_ptdf(grid);
    std::set<int> local_lines;
    std::set<int>& lines = active_lines ? *active_lines : local_lines;
    std::set<int> added;

    auto add_line_rows = [&](std::size_t k) {
        const Branch& br = grid.branches()[k];
        const auto kr = static_cast<Eigen::Index>(k);
        for (int t = 0; t < T; ++t) {
            std::vector<opt::Term> row;
            double load_flow = 0.0;
            for (std::size_t n = 0; n < grid.num_buses(); ++n)
                load_flow += ptdf.values(kr, static_cast<Eigen::Index>(n)) * demand.demand(n, h0 + t);
            for (std::size_t g = 0; g < G; ++g) {
                const double a = ptdf.values(kr, static_cast<Eigen::Index>(grid.generator_bus_index(g)));
                if (std::abs(a) < 1e-12) continue;
                add_output_terms(row, cols[g], grid.generators()[g], t, a);
            }
            if (row.empty()) continue;
            lp.add_constraint(row, opt::Sense::LessEqual, br.flow_limit + load_flow);
            lp.add_constraint(row, opt::Sense::GreaterEqual, -br.flow_limit + load_flow);
        }
        added.insert(br.id);
    };
    for (int id : lines)
        if (grid.branches()[grid.branch_index(id)].in_service) add_line_rows(grid.branch_index(id));

    ScucDay out;
    out.day = day;
    for (int round = 0; round <= options.max_network_rounds; ++round) {
        const opt::Solution sol = opt::solve_milp(mip, options.scuc_solver);
        out.status = sol.status;
        out.nodes += sol.nodes;
        out.network_rounds = round + 1;
        if (sol.x.empty()) return out;
        if (sol.status == opt::Status::NodeLimit)
            spdlog::warn("scuc day {}: node limit reached, using the incumbent", day);

        std::vector<std::vector<double>> p(G, std::vector<double>(T, 0.0));
        for (std::size_t g = 0; g < G; ++g) {
            const Generator& gen = grid.generators()[g];
            for (int t = 0; t < T; ++t) {
                double v = 0.0;
                if (!cols[g].fixed_on) v += gen.pmin * std::round(sol.x[static_cast<std::size_t>(cols[g].u[static_cast<std::size_t>(t)])]);
                for (int s : cols[g].seg[static_cast<std::size_t>(t)]) v += sol.x[static_cast<std::size_t>(s)];
                p[g][static_cast<std::size_t>(t)] = v;
            }
        }

        // Line limits violated by this dispatch join the model for all hours.
        bool violated = false;
        for (std::size_t k = 0; k < grid.num_branches(); ++k) {
            const Branch& br = grid.branches()[k];
            if (!br.in_service || added.count(br.id)) continue;
            const auto kr = static_cast<Eigen::Index>(k);
            for (int t = 0; t < T; ++t) {
                double f = 0.0;
                for (std::size_t n = 0; n < grid.num_buses(); ++n)
                    f -= ptdf.values(kr, static_cast<Eigen::Index>(n)) * demand.demand(n, h0 + t);
                for (std::size_t g = 0; g < G; ++g)
                    f += ptdf.values(kr, static_cast<Eigen::Index>(grid.generator_bus_index(g))) * p[g][static_cast<std::size_t>(t)];
                if (std::abs(f) > br.flow_limit + 1e-6 * (1.0 + br.flow_limit)) {
                    lines.insert(br.id);
                    add_line_rows(k);
                    violated = true;
                    break;
                }
            }
        }
        if (violated && round < options.max_network_rounds) continue;
        if (violated) {
            out.status = opt::Status::IterationLimit;
            return out;
        }

        out.objective = sol.objective;
        out.p = std::move(p);
        out.u.assign(G, std::vector<std::uint8_t>(T, 1));
        out.y.assign(G, std::vector<std::uint8_t>(T, 0));
        out.z.assign(G, std::vector<std::uint8_t>(T, 0));
        for (std::size_t g = 0; g < G; ++g) {
            if (cols[g].fixed_on) continue;
            for (int t = 0; t < T; ++t) {
                const auto ts = static_cast<std::size_t>(t);
                out.u[g][ts] = sol.x[static_cast<std::size_t>(cols[g].u[ts])] > 0.5 ? 1 : 0;
                out.y[g][ts] = sol.x[static_cast<std::size_t>(cols[g].y[ts])] > 0.5 ? 1 : 0;
                out.z[g][ts] = sol.x[static_cast<std::size_t>(cols[g].z[ts])] > 0.5 ? 1 : 0;
            }
        }
        return out;
    }
    return out;
}

double decomposition_residual(const PtdfMatrix& ptdf, const HourlyMarketLog& log) {
    const auto nb = ptdf.values.cols();
    const auto nl = ptdf.values.rows();
    Eigen::VectorXd mu(nl);
    for (Eigen::Index k = 0; k < nl; ++k)
        mu[k] = log.mu_plus[static_cast<std::size_t>(k)] - log.mu_minus[static_cast<std::size_t>(k)];
    const Eigen::VectorXd congestion = ptdf.values.transpose() * mu;
    double worst = 0.0;
    for (Eigen::Index n = 0; n < nb; ++n)
        worst = std::max(worst, std::abs(log.lmp[static_cast<std::size_t>(n)] - (log.lambda_sys - congestion[n])));
    return worst;
}

ScedDay run_sced(const DemandOverlay& demand, const ScucDay& commitment, const std::vector<UnitState>& start,
                 const MarketOptions& options) {
    const GridCase& grid = demand.grid();
    const std::size_t G = grid.num_generators();
    const std::size_t N = grid.num_buses();
    const std::size_t L = grid.num_branches();
    const int h0 = commitment.day * 24;
    const PtdfMatrix ptdf = build_ptdf(grid);
    const std::size_t slack = grid.slack_index();

    ScedDay out;
    std::vector<UnitState> state = start;
    for (int t = 0; t < 24; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        const int hour = h0 + t;
        opt::LinearProgram lp;
        std::vector<int> theta(N);
        for (std::size_t n = 0; n < N; ++n)
            theta[n] = n == slack ? lp.add_variable(0.0, 0.0, 0.0) : lp.add_variable(-opt::kInfinity, opt::kInfinity, 0.0);

        std::vector<std::vector<opt::Term>> balance(N);
        std::vector<double> rhs(N);
        for (std::size_t n = 0; n < N; ++n) rhs[n] = demand.demand(n, hour);

        std::vector<std::vector<int>> segs(G);
        std::vector<double> floor(G, 0.0);
        for (std::size_t g = 0; g < G; ++g) {
            const Generator& gen = grid.generators()[g];
            const bool on = commitment.u[g][ts] != 0;
            if (!on) continue;
            const bool fixed_on = always_on(gen);
            const double lo = fixed_on ? 0.0 : gen.pmin;
            const double cap = std::min(grid.generator_pmax(g, hour), gen.pmax);
            double p_lo = lo, p_hi = cap;
            if (state[g].output) {
                if (state[g].on) {
                    p_lo = std::max(p_lo, *state[g].output - gen.ramp_down);
                    p_hi = std::min(p_hi, *state[g].output + gen.ramp_up);
                } else {
                    p_hi = std::min(p_hi, startup_ramp(gen));
                }
            }
            if (p_hi < p_lo - 1e-7) {
                out.failure = fmt::format("sced hour {}: unit {} cannot meet its ramp/capacity window", hour, gen.id);
                return out;
            }
            p_hi = std::max(p_hi, p_lo);
            floor[g] = lo;
            const std::size_t n = grid.generator_bus_index(g);
            rhs[n] -= lo;
            double width = 0.0;
            for (const CostSegment& s : linearize(gen.cost, lo, gen.pmax, options.cost_segments)) {
                const int v = lp.add_variable(0.0, s.width, s.slope);
                segs[g].push_back(v);
                balance[n].push_back({v, 1.0});
                width += s.width;
            }
            if (segs[g].empty()) continue;
            std::vector<opt::Term> row;
            for (int v : segs[g]) row.push_back({v, 1.0});
            if (p_hi - lo < width - 1e-9) lp.add_constraint(row, opt::Sense::LessEqual, p_hi - lo);
            if (p_lo > lo + 1e-9) lp.add_constraint(row, opt::Sense::GreaterEqual, p_lo - lo);
        }

        std::vector<double> coef(L, 0.0);
        for (std::size_t k = 0; k < L; ++k) {
            const Branch& br = grid.branches()[k];
            if (!br.in_service) continue;
            coef[k] = grid.base_mva() * br.susceptance;
            const std::size_t f = grid.bus_index(br.from_bus);
            const std::size_t to = grid.bus_index(br.to_bus);
            balance[f].push_back({theta[f], -coef[k]});
            balance[f].push_back({theta[to], coef[k]});
            balance[to].push_back({theta[f], coef[k]});
            balance[to].push_back({theta[to], -coef[k]});
        }
        std::vector<int> balance_row(N);
        for (std::size_t n = 0; n < N; ++n) balance_row[n] = lp.add_constraint(balance[n], opt::Sense::Equal, rhs[n]);
        std::vector<int> up_row(L, -1), dn_row(L, -1);
        for (std::size_t k = 0; k < L; ++k) {
            const Branch& br = grid.branches()[k];
            if (!br.in_service) continue;
            const int f = theta[grid.bus_index(br.from_bus)];
            const int to = theta[grid.bus_index(br.to_bus)];
            up_row[k] = lp.add_constraint({{f, coef[k]}, {to, -coef[k]}}, opt::Sense::LessEqual, br.flow_limit);
            dn_row[k] = lp.add_constraint({{f, coef[k]}, {to, -coef[k]}}, opt::Sense::GreaterEqual, -br.flow_limit);
        }

        const opt::Solution sol = opt::solve_lp(lp, options.sced_solver);
        if (!sol.optimal()) {
            out.failure = fmt::format("sced hour {}: {}", hour, opt::to_string(sol.status));
            return out;
        }

        HourlyMarketLog log;
        log.hour = hour;
        log.lmp.resize(N);
        for (std::size_t n = 0; n < N; ++n) log.lmp[n] = sol.duals[static_cast<std::size_t>(balance_row[n])];
        log.lambda_sys = log.lmp[slack];
        log.mu_plus.assign(L, 0.0);
        log.mu_minus.assign(L, 0.0);
        log.flow.assign(L, 0.0);
        double worst_mu = 0.0;
        for (std::size_t k = 0; k < L; ++k) {
            if (up_row[k] < 0) continue;
            const Branch& br = grid.branches()[k];
            log.mu_plus[k] = std::max(0.0, -sol.duals[static_cast<std::size_t>(up_row[k])]);
            log.mu_minus[k] = std::max(0.0, sol.duals[static_cast<std::size_t>(dn_row[k])]);
            log.flow[k] = coef[k] * (sol.x[static_cast<std::size_t>(theta[grid.bus_index(br.from_bus)])] -
                                     sol.x[static_cast<std::size_t>(theta[grid.bus_index(br.to_bus)])]);
            worst_mu = std::max(worst_mu, log.mu_plus[k] + log.mu_minus[k]);
        }
        log.binding = worst_mu > options.eps_mu;
        log.dispatch.assign(G, 0.0);
        for (std::size_t g = 0; g < G; ++g) {
            if (commitment.u[g][ts] == 0) continue;
            double v = floor[g];
            for (int s : segs[g]) v += sol.x[static_cast<std::size_t>(s)];
            log.dispatch[g] = v;
        }
        log.decomposition_residual = decomposition_residual(ptdf, log);
        if (log.decomposition_residual > options.decomposition_tolerance)
            spdlog::warn("sced hour {}: LMP decomposition residual {:.3g} exceeds tolerance", hour,
                         log.decomposition_residual);

        for (std::size_t g = 0; g < G; ++g) {
            const bool on = commitment.u[g][ts] != 0;
            if (on == state[g].on)
                ++state[g].hours_in_state;
            else
                state[g].hours_in_state = 1;
            state[g].on = on;
            state[g].output = log.dispatch[g];
        }
        out.hours.push_back(std::move(log));
    }
    out.ok = true;
    out.end_state = std::move(state);
    return out;
}

ScenarioRun simulate_scenario(const DemandOverlay& demand, const std::vector<DayBlock>& blocks,
                              const MarketOptions& options, const std::string& envelope) {
    ScenarioRun run;
    run.bus = demand.bus();
    run.envelope = envelope;
    std::set<int> active_lines;
    for (const DayBlock& block : blocks) {
        std::vector<UnitState> state = initial_unit_states(demand.grid());
        for (int d = block.first_day; d < block.first_day + block.num_days; ++d) {
            const ScucDay uc = run_scuc(demand, d, state, options, &active_lines);
            if (!uc.ok()) {
                run.excluded = true;
                run.failed_day = d;
                run.reason = fmt::format("scuc day {}: {}", d, opt::to_string(uc.status));
                return run;
            }
            ScedDay ed = run_sced(demand, uc, state, options);
            if (!ed.ok) {
                run.excluded = true;
                run.failed_day = d;
                run.reason = ed.failure;
                return run;
            }
            for (auto& h : ed.hours) run.logs.push_back(std::move(h));
            state = std::move(ed.end_state);
        }
    }
    return run;
}

const char* to_string(Window w) {
    switch (w) {
        case Window::All: return "all";
        case Window::OnPeak: return "on_peak";
        case Window::OffPeak: return "off_peak";
    }
    return "all";
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("percentile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<const HourlyMarketLog*> window_hours(const std::vector<HourlyMarketLog>& logs, Window window,
                                                 const std::set<int>& peak_hours) {
    std::vector<const HourlyMarketLog*> out;
    for (const auto& log : logs) {
        const bool peak = peak_hours.count(1 + log.hour % 24) != 0;
        if (window == Window::All || (window == Window::OnPeak) == peak) out.push_back(&log);
    }
    return out;
}

MetricRecord compute_metrics(const std::vector<HourlyMarketLog>& logs, Window window, const std::set<int>& peak_hours,
                             const std::vector<double>& flow_limits) {
    const auto hours = window_hours(logs, window, peak_hours);
    if (hours.size() < 2)
        throw std::invalid_argument(fmt::format("window '{}' has {} hour(s); at least two are needed", to_string(window),
                                                hours.size()));
    MetricRecord m;
    m.window = window;
    m.hours = static_cast<int>(hours.size());
    std::vector<double> means;
    double spread = 0.0, rent = 0.0;
    for (const HourlyMarketLog* h : hours) {
        means.push_back(std::accumulate(h->lmp.begin(), h->lmp.end(), 0.0) / static_cast<double>(h->lmp.size()));
        spread += percentile(h->lmp, 0.95) - percentile(h->lmp, 0.05);
        if (h->binding) m.binding_hours += 1.0;
        for (std::size_t k = 0; k < h->mu_plus.size(); ++k)
            rent += (h->mu_plus[k] + h->mu_minus[k]) * flow_limits[k];
    }
    const double n = static_cast<double>(hours.size());
    m.mean_lmp = std::accumulate(means.begin(), means.end(), 0.0) / n;
    m.p95_p5 = spread / n;
    double ss = 0.0;
    for (double v : means) ss += (v - m.mean_lmp) * (v - m.mean_lmp);
    m.lmp_std = std::sqrt(ss / (n - 1.0));
    m.congestion_rent = 24.0 / n * rent / 1e6;
    return m;
}

const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names{"mean_lmp", "p95_p5", "lmp_std", "binding_hours", "congestion_rent"};
    return names;
}

double metric_value(const MetricRecord& m, const std::string& name) {
    if (name == "mean_lmp") return m.mean_lmp;
    if (name == "p95_p5") return m.p95_p5;
    if (name == "lmp_std") return m.lmp_std;
    if (name == "binding_hours") return m.binding_hours;
    if (name == "congestion_rent") return m.congestion_rent;
    throw std::invalid_argument("unknown metric " + name);
}

std::vector<SummaryRow> summarize(const std::string& envelope, const std::vector<std::vector<MetricRecord>>& scenarios) {
    std::vector<SummaryRow> rows;
    for (Window w : {Window::All, Window::OnPeak, Window::OffPeak}) {
        for (const std::string& name : metric_names()) {
            SummaryRow row;
            row.envelope = envelope;
            row.window = w;
            row.metric = name;
            std::vector<double> values;
            for (const auto& recs : scenarios)
                for (const MetricRecord& m : recs)
                    if (m.window == w) values.push_back(metric_value(m, name));
            row.n = static_cast<int>(values.size());
            if (values.empty()) {
                row.empty = true;
            } else {
                row.median = percentile(values, 0.5);
                row.iqr = percentile(values, 0.75) - percentile(values, 0.25);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace gridsiter
