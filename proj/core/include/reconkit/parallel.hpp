#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace reconkit {

/* Worker count: RECONKIT_THREADS when set, otherwise hardware concurrency
   capped at 16. Parallelism never affects results: every call site writes to
   disjoint preallocated slots. */
inline int thread_count() {
  static const int n = [] {
    if (const char* env = std::getenv("RECONKIT_THREADS")) {
      int v = std::atoi(env);
      if (v >= 1 && v <= 256) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : int(hc > 16 ? 16 : hc);
  }();
  return n;
}

inline void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  const int workers = thread_count();
  if (workers <= 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto body = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int spawn = int(n < size_t(workers) ? n : size_t(workers));
  pool.reserve(spawn);
  for (int t = 0; t < spawn; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace reconkit
