#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace epsc {

// Runs fn(chunk_id, begin, end) over fixed-size chunks of [0, n). Chunk boundaries do not
// depend on the worker count, so callers that merge per-chunk results in chunk order are
// deterministic at any parallelism.
template <class Fn>
void for_chunks(size_t n, size_t chunk, int workers, Fn&& fn) {
  const size_t nchunks = (n + chunk - 1) / chunk;
  if (nchunks == 0) return;
  workers = std::max(1, std::min<int>(workers, static_cast<int>(nchunks)));
  if (workers == 1) {
    for (size_t c = 0; c < nchunks; ++c) fn(c, c * chunk, std::min(n, (c + 1) * chunk));
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (size_t c = next++; c < nchunks; c = next++) fn(c, c * chunk, std::min(n, (c + 1) * chunk));
    });
  for (auto& t : pool) t.join();
}

}  // namespace epsc
