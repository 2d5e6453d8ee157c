#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace llamafur {

// Splits [0, n) into contiguous chunks, one worker per chunk. Results must be
// written to disjoint slots so the outcome does not depend on scheduling.
template <typename Fn>
void parallel_chunks(std::uint64_t n, unsigned threads, Fn&& chunk_fn) {
  if (n == 0) return;
  if (threads <= 1 || n == 1) {
    chunk_fn(0u, std::uint64_t{0}, n);
    return;
  }
  if (threads > n) threads = static_cast<unsigned>(n);
  const std::uint64_t chunk = (n + threads - 1) / threads;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    const std::uint64_t begin = static_cast<std::uint64_t>(t) * chunk;
    if (begin >= n) break;
    const std::uint64_t end = begin + chunk < n ? begin + chunk : n;
    pool.emplace_back([&chunk_fn, t, begin, end] { chunk_fn(t, begin, end); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace llamafur
