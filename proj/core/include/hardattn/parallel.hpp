#pragma once

#include <cstddef>
#include <functional>

namespace hardattn {

/// Worker pool size: HARDATTN_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs fn(i) for i in [0, count) across the worker pool. Calls made from
/// inside a running parallel_for execute sequentially. The first exception
/// thrown by any task is rethrown after all workers have joined.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace hardattn
