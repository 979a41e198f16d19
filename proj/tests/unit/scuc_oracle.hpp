#pragma once

// Brute-force unit commitment oracle. Committable units are only available
// inside a short window, so the free commitment binaries number
// units × window ≤ 20; a price-taking backstop unit without commitment
// economics covers the rest of the day. Each pattern is checked for
// min up/down and reserve feasibility and dispatched by merit order over the
// chord segments of each unit's cost curve.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "gridsiter/market.hpp"

namespace scuc_oracle {

using namespace gridsiter;

struct Instance {
    int units = 2;
    int window = 4;
    int first = 8;  // first hour of the window
    double reserve = 0.0;
    double backstop_pmax = 200.0;
    double backstop_c1 = 150.0;
    std::vector<Generator> gens;  // committable units
    std::vector<double> demand;   // 24 hours
};

inline Instance random_instance(std::mt19937_64& rng, int k) {
    static const int shapes[][2] = {{2, 4}, {2, 6}, {2, 8}, {3, 4}, {3, 5}, {3, 6}};
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto pick = [&](double lo, double hi) { return lo + (hi - lo) * U(rng); };
    auto round2 = [](double x) { return std::round(x * 4.0) / 4.0; };
    Instance in;
    in.units = shapes[k % 6][0];
    in.window = shapes[k % 6][1];
    in.first = 6 + static_cast<int>(U(rng) * 8);
    in.reserve = (k % 2 == 0) ? 0.0 : 0.03;
    for (int g = 0; g < in.units; ++g) {
        Generator gen = fixtures::unit(g + 1, 1, round2(pick(60, 150)), round2(pick(15, 60)), round2(pick(5, 40)),
                                       std::round(pick(0, 0.05) * 1000) / 1000);
        gen.cost.c0 = round2(pick(0, 80));
        gen.no_load_cost = round2(pick(0, 40));
        gen.startup_cost = round2(pick(0, 600));
        gen.shutdown_cost = round2(pick(0, 80));
        gen.min_up = 1 + static_cast<int>(U(rng) * 3);
        gen.min_down = 1 + static_cast<int>(U(rng) * 3);
        in.gens.push_back(gen);
    }
    for (int t = 0; t < 24; ++t) {
        const bool inside = t >= in.first && t < in.first + in.window;
        in.demand.push_back(round2(inside ? pick(60, 320) : pick(40, 180)));
    }
    return in;
}

inline GridCase build_case(const Instance& in) {
    CaseData d;
    d.slack_bus = 1;
    d.buses = {fixtures::bus(1, 138.0, "load"), fixtures::bus(2)};
    d.branches = {fixtures::line(1, 1, 2, 1e5)};
    d.series["load"] = fixtures::series("load", in.demand);
    for (std::size_t g = 0; g < in.gens.size(); ++g) {
        Generator gen = in.gens[g];
        const std::string ref = "avail" + std::to_string(g + 1);
        std::vector<double> cap(24, 0.0);
        for (int t = in.first; t < in.first + in.window; ++t) cap[static_cast<std::size_t>(t)] = gen.pmax;
        d.series[ref] = fixtures::series(ref, cap);
        gen.renewable_profile_ref = ref;
        d.generators.push_back(gen);
    }
    d.generators.push_back(fixtures::unit(100, 2, in.backstop_pmax, in.backstop_c1));
    return GridCase(d);
}

inline ScucDay solve(const Instance& in) {
    const GridCase g = build_case(in);
    MarketOptions o;
    o.reserve_fraction = in.reserve;
    o.scuc_solver.tol.gap_relative = 0.0;
    o.scuc_solver.tol.gap_absolute = 1e-7;
    return run_scuc(DemandOverlay(g), 0, initial_unit_states(g), o);
}

struct Seg {
    double width, slope;
};

// Chords over [lo, hi] in five equal widths.
inline std::vector<Seg> chords(const CostCurve& c, double lo, double hi) {
    std::vector<Seg> out;
    const double w = (hi - lo) / 5.0;
    for (int k = 0; k < 5; ++k) {
        const double a = lo + k * w, b = lo + (k + 1) * w;
        out.push_back({w, (c(b) - c(a)) / w});
    }
    return out;
}

inline double enumerate(const Instance& in) {
    const int n = in.units * in.window;
    const double inf = std::numeric_limits<double>::infinity();
    double best = inf;
    const auto backstop = fixtures::unit(100, 2, in.backstop_pmax, in.backstop_c1);
    for (long mask = 0; mask < (1L << n); ++mask) {
        std::vector<std::vector<int>> u(static_cast<std::size_t>(in.units), std::vector<int>(24, 0));
        for (int g = 0; g < in.units; ++g)
            for (int w = 0; w < in.window; ++w)
                u[static_cast<std::size_t>(g)][static_cast<std::size_t>(in.first + w)] =
                    static_cast<int>((mask >> (g * in.window + w)) & 1);
        double cost = 0.0;
        bool ok = true;
        for (int g = 0; g < in.units && ok; ++g) {
            const auto& gen = in.gens[static_cast<std::size_t>(g)];
            const auto& ug = u[static_cast<std::size_t>(g)];
            std::vector<int> y(24), z(24);
            for (int t = 0; t < 24; ++t) {
                const int prev = t == 0 ? 0 : ug[static_cast<std::size_t>(t - 1)];
                y[static_cast<std::size_t>(t)] = std::max(0, ug[static_cast<std::size_t>(t)] - prev);
                z[static_cast<std::size_t>(t)] = std::max(0, prev - ug[static_cast<std::size_t>(t)]);
                cost += y[static_cast<std::size_t>(t)] * gen.startup_cost + z[static_cast<std::size_t>(t)] * gen.shutdown_cost;
            }
            for (int t = 0; t < 24 && ok; ++t) {
                int ups = 0, downs = 0;
                for (int s = std::max(0, t - gen.min_up + 1); s <= t; ++s) ups += y[static_cast<std::size_t>(s)];
                for (int s = std::max(0, t - gen.min_down + 1); s <= t; ++s) downs += z[static_cast<std::size_t>(s)];
                if (ups > ug[static_cast<std::size_t>(t)] || downs > 1 - ug[static_cast<std::size_t>(t)]) ok = false;
            }
        }
        if (!ok) continue;
        for (int t = 0; t < 24 && ok; ++t) {
            const double D = in.demand[static_cast<std::size_t>(t)];
            double floor = 0.0, cap = in.backstop_pmax;
            std::vector<Seg> segs = chords(backstop.cost, 0.0, backstop.pmax);
            for (int g = 0; g < in.units; ++g) {
                if (!u[static_cast<std::size_t>(g)][static_cast<std::size_t>(t)]) continue;
                const auto& gen = in.gens[static_cast<std::size_t>(g)];
                floor += gen.pmin;
                cap += gen.pmax;
                cost += gen.cost(gen.pmin) + gen.no_load_cost;
                const auto c = chords(gen.cost, gen.pmin, gen.pmax);
                segs.insert(segs.end(), c.begin(), c.end());
            }
            if (floor > D + 1e-9 || cap < D - 1e-9 || cap - D < in.reserve * D - 1e-9) {
                ok = false;
                break;
            }
            std::stable_sort(segs.begin(), segs.end(), [](const Seg& a, const Seg& b) { return a.slope < b.slope; });
            double rest = D - floor;
            for (const auto& s : segs) {
                const double take = std::min(rest, s.width);
                cost += take * s.slope;
                rest -= take;
                if (rest <= 0.0) break;
            }
        }
        if (ok) best = std::min(best, cost);
    }
    return best;
}

}  // namespace scuc_oracle
