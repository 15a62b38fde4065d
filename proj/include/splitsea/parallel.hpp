#pragma once

#include <cstddef>
#include <functional>

namespace splitsea {

/// Worker count used by batch routines.  Defaults to the hardware
/// concurrency; SPLITSEA_THREADS overrides it at first use.
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Calls body(i) for i in [0, n) on up to thread_count() workers.  Indices are
/// split into contiguous blocks, so writing results to slot i keeps any later
/// reduction order fixed.  The first exception thrown by a worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

} // namespace splitsea
