#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace rzstats::detail {

// Runs body(begin, end) over [0, n) split into contiguous blocks.
template <typename Body>
void parallel_blocks(std::size_t n, unsigned threads, Body&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n ? n : 1)));
  if (threads == 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  const std::size_t block = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = std::min(n, t * block);
    const std::size_t end = std::min(n, begin + block);
    if (begin == end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
}

inline unsigned default_threads() {
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace rzstats::detail
