#pragma once

#include <vector>

#include "gridsiter/grid.hpp"

namespace gridsiter {

struct CostSegment {
    double width = 0.0;  // MW
    double slope = 0.0;  // $/MWh
};

/// Equal-width chords of a convex cost curve over [lo, hi]. Empty when hi <= lo.
std::vector<CostSegment> linearize(const CostCurve& cost, double lo, double hi, int segments = 5);

}  // namespace gridsiter
