#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace isoflow {

/// Worker cap: ISOFLOW_THREADS when set, else hardware concurrency.
inline int worker_count(int jobs) {
  unsigned hw = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("ISOFLOW_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) hw = static_cast<unsigned>(v);
  }
  if (hw == 0) hw = 1;
  return static_cast<int>(std::min<long>(static_cast<long>(hw), jobs));
}

/// Runs fn(0..n-1) on a small worker pool; rethrows the first exception.
template <typename F>
void parallel_for(int n, F&& fn) {
  if (n <= 0) return;
  const int workers = worker_count(n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (int i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace isoflow
