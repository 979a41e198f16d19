#pragma once

// Small hand-built cases shared by the unit and acceptance suites.

#include <string>
#include <vector>

#include "gridsiter/grid.hpp"

namespace fixtures {

using namespace gridsiter;

inline Bus bus(int id, double kv = 138.0, std::string load_ref = {}) {
    Bus b;
    b.id = id;
    b.base_kv = kv;
    b.zone = "z";
    b.coord = Coordinate{-97.0 + 0.1 * id, 31.0};
    b.load_profile_ref = std::move(load_ref);
    return b;
}

inline Branch line(int id, int from, int to, double limit, double b = 10.0) {
    Branch br;
    br.id = id;
    br.from_bus = from;
    br.to_bus = to;
    br.susceptance = b;
    br.flow_limit = limit;
    return br;
}

inline Generator unit(int id, int at, double pmax, double c1, double pmin = 0.0, double c2 = 0.0) {
    Generator g;
    g.id = id;
    g.bus = at;
    g.pmin = pmin;
    g.pmax = pmax;
    g.ramp_up = pmax;
    g.ramp_down = pmax;
    g.cost = {c2, c1, 0.0};
    return g;
}

inline TimeSeries series(std::string id, std::vector<double> v) { return {std::move(id), std::move(v)}; }

/// Generator at bus 1 (0-200 MW), 100 MW load at bus 2, one line with the given limit.
inline GridCase radial_pair(double limit, int hours = 24) {
    CaseData d;
    d.slack_bus = 1;
    d.buses = {bus(1), bus(2, 138.0, "load")};
    d.branches = {line(1, 1, 2, limit)};
    d.generators = {unit(1, 1, 200.0, 10.0)};
    d.series["load"] = series("load", std::vector<double>(static_cast<std::size_t>(hours), 100.0));
    return GridCase(d);
}

/// Cheap $10 unit at bus 1, $50 unit at bus 2, load at bus 2, 60 MW line.
inline GridCase congested_pair(std::vector<double> load) {
    CaseData d;
    d.slack_bus = 1;
    d.buses = {bus(1), bus(2, 138.0, "load")};
    d.branches = {line(1, 1, 2, 60.0)};
    d.generators = {unit(1, 1, 200.0, 10.0), unit(2, 2, 200.0, 50.0)};
    d.series["load"] = series("load", std::move(load));
    return GridCase(d);
}

/// Equal-susceptance triangle 1-2-3 with load at bus 3.
inline GridCase triangle() {
    CaseData d;
    d.slack_bus = 1;
    d.buses = {bus(1), bus(2), bus(3, 138.0, "load")};
    d.branches = {line(1, 1, 2, 500.0, 1.0), line(2, 2, 3, 500.0, 1.0), line(3, 1, 3, 500.0, 1.0)};
    d.generators = {unit(1, 1, 300.0, 10.0), unit(2, 2, 300.0, 20.0)};
    d.series["load"] = series("load", std::vector<double>(24, 90.0));
    return GridCase(d);
}

inline const std::vector<std::string>& bundled_cases() {
    static const std::vector<std::string> names{"data/cases/case2.json", "data/cases/case3.json",
                                                "data/cases/case5.json", "data/cases/grid20.json"};
    return names;
}

}  // namespace fixtures
