#pragma once

#include <cstddef>
#include <functional>

namespace muxillum {

/// Worker count from MUXILLUM_WORKERS, defaulting to hardware concurrency.
int worker_count();

/// Overrides the worker count for the current process (0 restores the
/// environment/hardware default).
void set_worker_count(int workers);

/// Runs body(i) for i in [0, n). Work is split into contiguous static chunks;
/// callers write results by index so output never depends on the schedule.
/// Nested calls run serially on the calling thread. The first exception
/// thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace muxillum
