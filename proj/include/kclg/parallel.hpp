#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kclg {

inline unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Runs f(i) for i in [0, n) on up to `jobs` threads. Each index is handled by
/// exactly one call; results are written by index, so the outcome does not
/// depend on scheduling. The first exception is rethrown after all workers stop.
template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& f) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) return;
          try {
            f(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(n);
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace kclg
