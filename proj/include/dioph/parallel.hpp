#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dioph {

/// Index-ordered parallel map with deterministic output: results land in
/// slot i regardless of scheduling, so reductions over the vector are
/// reproducible at any worker count.
template <typename T, typename F>
std::vector<T> parallel_map(std::int64_t count, int jobs, F&& fn) {
  std::vector<T> out(static_cast<size_t>(count));
  if (count == 0) return out;
  if (jobs < 1) jobs = 1;
  if (jobs == 1) {
    for (std::int64_t i = 0; i < count; ++i) out[static_cast<size_t>(i)] = fn(i);
    return out;
  }
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[static_cast<size_t>(i)] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace dioph
