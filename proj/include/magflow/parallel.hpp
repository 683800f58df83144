#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include <cstdlib>

namespace magflow {

/// Worker-thread budget: hardware concurrency capped by MAGFLOW_THREADS.
inline int thread_cap() {
  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (cap < 1) cap = 1;
  if (const char* env = std::getenv("MAGFLOW_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v < cap) cap = static_cast<int>(v);
  }
  return cap;
}

/// Runs fn(i) for i in [0, n) on a static block partition.  Each index owns
/// its output slot, so aggregation order is deterministic regardless of the
/// thread count.  The first exception (lowest block) is rethrown after join.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(thread_cap(), std::max(1, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const int lo = w * chunk, hi = std::min(n, lo + chunk);
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace magflow
