#pragma once

#include <cstddef>
#include <functional>

namespace klkit {

// Worker count: hardware concurrency capped by the KLKIT_THREADS environment
// variable (values < 1 mean serial).
int worker_thread_count();

// Runs body(i) for i in [0, n).  Writers must only touch slot i of
// preallocated output, which keeps results independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace klkit
