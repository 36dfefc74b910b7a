#pragma once

#include <cstddef>
#include <functional>

namespace lac {

/// Number of worker threads: hardware concurrency capped by the
/// RANKAGG_THREADS environment variable (re-read on every call).
int worker_count();

/// Runs fn(i) for every i in [0, n), splitting the range into contiguous
/// blocks, one per worker. Each index is processed by exactly one thread,
/// so per-index outputs are identical to a sequential run.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace lac
