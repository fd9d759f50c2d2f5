#pragma once

#include <cstddef>
#include <functional>

namespace mixsmooth {

/// Worker count from MIXED_SMOOTH_THREADS (unset or 0 = hardware concurrency).
/// Malformed values fall back to 1.
int thread_count();

/// Overrides the environment for the rest of the process; 0 restores it.
void set_thread_count(int n);

/// Runs body(0) .. body(count-1), possibly concurrently. Callers store results
/// by index and reduce afterwards, so output never depends on scheduling. If
/// any call throws, the exception from the smallest index is rethrown after
/// all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace mixsmooth
