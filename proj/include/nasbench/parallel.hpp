#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace nasbench {

/// Calls fn(chunk_index, begin, end) for fixed-size chunks of [0, n) on up to
/// `jobs` threads. Chunk boundaries do not depend on `jobs`, so per-chunk
/// results reduced in chunk order are identical for every thread count.
template <typename Fn>
void for_chunks(std::size_t n, std::size_t chunk, int jobs, Fn&& fn) {
  if (chunk == 0) chunk = 1;
  const std::size_t chunks = (n + chunk - 1) / chunk;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t c; (c = next.fetch_add(1)) < chunks && !failed;) {
      try {
        fn(c, c * chunk, std::min(n, (c + 1) * chunk));
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(jobs, 1));
  if (threads == 1 || chunks <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(threads, chunks); ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

/// out[i] = fn(i) for i in [0, n), in parallel.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, int jobs, Fn&& fn) {
  std::vector<T> out(n);
  for_chunks(n, 4096, jobs, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = fn(i);
  });
  return out;
}

}  // namespace nasbench
