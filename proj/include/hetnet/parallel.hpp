#pragma once

#include <cstddef>
#include <functional>

namespace hetnet {

/// Worker count: HETNET_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for every i in [0, n) on up to `workers` threads. Work items
/// are claimed dynamically, so callers must write results by index. The
/// first exception thrown by any item is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t workers = worker_count());

}  // namespace hetnet
