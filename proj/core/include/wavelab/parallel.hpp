#pragma once

#include <cstddef>
#include <functional>

namespace wavelab {

// Worker cap for parallel_for; 0 means std::thread::hardware_concurrency().
void set_worker_threads(unsigned count);
unsigned worker_threads();

// Runs body(i) for i in [0, count). Each index is handled by exactly one
// worker, so results written to per-index slots do not depend on scheduling.
// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace wavelab
