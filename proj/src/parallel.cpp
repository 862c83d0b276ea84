#include "tabaudit/parallel.hpp"

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace tabaudit {

namespace {
std::atomic<unsigned> g_workers{0};
thread_local bool t_inside_worker = false;
}  // namespace

void set_worker_count(unsigned n) { g_workers.store(n); }

unsigned worker_count() {
  unsigned n = g_workers.load();
  if (n == 0) {
    n = std::thread::hardware_concurrency();
  }
  return n == 0 ? 1u : n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = worker_count();
  if (n == 0) {
    return;
  }
  if (workers <= 1 || n == 1 || t_inside_worker) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }

  const std::size_t used = std::min<std::size_t>(workers, n);
  std::vector<std::exception_ptr> errors(used);
  std::vector<std::thread> pool;
  pool.reserve(used);
  for (std::size_t w = 0; w < used; ++w) {
    pool.emplace_back([&, w] {
      t_inside_worker = true;
      const std::size_t begin = n * w / used;
      const std::size_t end = n * (w + 1) / used;
      try {
        for (std::size_t i = begin; i < end; ++i) {
          fn(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
      t_inside_worker = false;
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  // Rethrow the failure from the lowest chunk so the surfaced error does not
  // depend on thread timing.
  for (auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

}  // namespace tabaudit
