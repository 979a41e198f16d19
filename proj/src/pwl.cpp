#include "gridsiter/pwl.hpp"

namespace gridsiter {

std::vector<CostSegment> linearize(const CostCurve& cost, double lo, double hi, int segments) {
    std::vector<CostSegment> out;
    if (!(hi > lo) || segments < 1) return out;
    const double w = (hi - lo) / segments;
    for (int k = 0; k < segments; ++k) {
        const double a = lo + k * w;
        const double b = k + 1 == segments ? hi : a + w;
        out.push_back({b - a, (cost(b) - cost(a)) / (b - a)});
    }
    return out;
}

}  // namespace gridsiter
