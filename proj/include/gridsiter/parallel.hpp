#pragma once

#include <cstddef>
#include <functional>

namespace gridsiter {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each index runs
/// exactly once; callers write results into slot i so the merged output does
/// not depend on scheduling. The first exception is rethrown after all
/// workers stop.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace gridsiter
