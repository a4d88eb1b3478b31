#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace gmc {

inline int default_workers() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

/// Static partition of [0, n) into contiguous chunks, one thread each.
/// Results must be written to caller-owned slots indexed by item, so the
/// outcome cannot depend on the worker count.
inline void parallel_for(int64_t n, int workers,
                         const std::function<void(int64_t, int64_t)>& chunk_fn) {
  if (workers <= 0) workers = default_workers();
  if (n <= 0) return;
  if (workers == 1 || n == 1) {
    chunk_fn(0, n);
    return;
  }
  const int64_t nw = std::min<int64_t>(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(nw));
  const int64_t base = n / nw, rem = n % nw;
  int64_t begin = 0;
  for (int64_t w = 0; w < nw; ++w) {
    const int64_t len = base + (w < rem ? 1 : 0);
    pool.emplace_back(chunk_fn, begin, begin + len);
    begin += len;
  }
  for (auto& t : pool) t.join();
}

}  // namespace gmc
