#pragma once

#include <functional>

namespace gby {

// Worker count: GB_THREADS when set (>= 1), else the hardware concurrency.
int worker_count();

// Runs body(0), ..., body(count - 1) on up to worker_count() threads. The
// first exception thrown by any task is rethrown after all workers join.
void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace gby
