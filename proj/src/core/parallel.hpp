#ifndef LAPLAB_CORE_PARALLEL_HPP
#define LAPLAB_CORE_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace laplab {

// Worker cap from LAPLAB_THREADS (default: hardware concurrency, capped).
inline int worker_count() {
  if (const char* env = std::getenv("LAPLAB_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  int n = hw == 0 ? 1 : static_cast<int>(hw);
  return n > 8 ? 8 : n;
}

// Runs fn(0..n-1); each index must write only to its own result slot, so the
// output is identical regardless of scheduling.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
  int workers = worker_count();
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  if (workers > n) workers = n;
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error = nullptr;
  std::mutex err_mutex;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace laplab

#endif
