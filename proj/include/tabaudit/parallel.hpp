#pragma once

#include <cstddef>
#include <functional>

namespace tabaudit {

// Worker count used by parallel_for; 0 means hardware concurrency.
// Set once at startup (the CLI --threads flag); not thread-safe to change
// while a parallel_for is running.
void set_worker_count(unsigned n);
unsigned worker_count();

// Runs fn(i) for i in [0, n) on a static chunking of worker threads.
// Nested calls execute inline on the calling thread. Callers own any
// cross-iteration reduction and must perform it in index order, so results
// are identical for every worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace tabaudit
