#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace losc {

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads. Work is
/// handed out dynamically; callers write results by index so the outcome does
/// not depend on scheduling. The first exception is rethrown after joining.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned max_workers = 0) {
  unsigned workers = max_workers != 0 ? max_workers : std::thread::hardware_concurrency();
  workers = static_cast<unsigned>(std::min<std::size_t>(std::max(workers, 1u), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace losc
