#pragma once

#include <cstddef>
#include <functional>

namespace kawahara {

/// Worker count: KAWAHARA_THREADS if set (>= 1), else hardware concurrency;
/// never more than `tasks`.
unsigned worker_count(std::size_t tasks);

/// Calls body(i) for i in [0, n) across worker threads. Each index is
/// processed exactly once; callers write results to slot i, so the merge
/// order does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace kawahara
