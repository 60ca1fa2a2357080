#pragma once

#include <cstddef>
#include <functional>

namespace nodaltop {

/// Number of worker threads used by parallel_for. Defaults to the
/// NODALTOP_THREADS environment variable, else hardware concurrency.
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [0, n). Work is split into contiguous blocks; callers
/// write into pre-sized outputs indexed by i so results do not depend on the
/// schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace nodaltop
