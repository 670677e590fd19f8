#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace giraf::detail {

/// Splits [0, n) into at most `threads` contiguous chunks and runs
/// f(begin, end, chunk) for each, one thread per chunk. Chunk boundaries
/// depend only on (n, threads), so per-chunk partial results can be merged
/// in chunk order for thread-count-stable output.
template <class F>
std::size_t parallel_chunks(std::size_t n, int threads, F &&f)
{
  auto const chunks = std::max<std::size_t>(1, std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads))));
  if (chunks == 1) {
    f(std::size_t{0}, n, std::size_t{0});
    return 1;
  }
  std::vector<std::jthread> pool;
  pool.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    std::size_t const b = n * c / chunks;
    std::size_t const e = n * (c + 1) / chunks;
    pool.emplace_back([&f, b, e, c] { f(b, e, c); });
  }
  return chunks;
}

inline std::size_t chunk_count(std::size_t n, int threads)
{
  return std::max<std::size_t>(1, std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads))));
}

} // namespace giraf::detail
