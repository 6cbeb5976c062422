#pragma once

#include <cstddef>
#include <functional>

namespace curvegnn {

/// Worker count from CURVEGNN_WORKERS, else 1.
std::size_t default_workers();

/// Runs body(i) for i in [0, count) on up to `workers` threads. Each index is
/// visited exactly once; callers write results into slot i so the gathered
/// output does not depend on scheduling. The first exception thrown by any
/// worker is rethrown on the calling thread.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace curvegnn
