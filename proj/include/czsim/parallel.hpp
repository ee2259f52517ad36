#ifndef CZSIM_PARALLEL_HPP
#define CZSIM_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace czsim {

/// Worker count from CZSIM_THREADS, else hardware concurrency (at least 1).
int default_worker_count();

/// Runs body(i) for i in [0, n) on up to `workers` threads. Work is handed
/// out by index, so callers that write result[i] get a deterministic merge.
/// The first exception (lowest index) is rethrown after all workers stop.
template <typename Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr error;
  std::size_t error_index = n;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace czsim

#endif  // CZSIM_PARALLEL_HPP
