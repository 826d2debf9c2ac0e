#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vtest {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(begin, end) over a static partition of [0, count). Work items are
/// expected to be self-contained (per-item derived RNG streams, disjoint
/// output slots), so the partition shape never affects results.
template <typename Fn>
void parallel_for(std::int64_t count, int threads, Fn&& fn) {
  if (count <= 0) return;
  const int n_workers = static_cast<int>(
      std::min<std::int64_t>(resolve_threads(threads), count));
  if (n_workers <= 1) {
    fn(std::int64_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n_workers - 1);
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto run_range = [&](std::int64_t begin, std::int64_t end) {
    try {
      fn(begin, end);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };
  const std::int64_t chunk = (count + n_workers - 1) / n_workers;
  for (int w = 1; w < n_workers; ++w) {
    const std::int64_t begin = w * chunk;
    const std::int64_t end = std::min<std::int64_t>(begin + chunk, count);
    if (begin >= end) break;
    pool.emplace_back(run_range, begin, end);
  }
  run_range(0, std::min<std::int64_t>(chunk, count));
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace vtest
