#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace ctmap {

// Splits [begin, end) into `threads` contiguous chunks and runs
// fn(chunk_begin, chunk_end) on each. threads <= 1 runs inline. Callers must
// only write to locations owned by their chunk.
template <typename Fn>
void parallel_for(int begin, int end, int threads, Fn&& fn) {
  const int n = end - begin;
  if (n <= 0) return;
  threads = std::clamp(threads, 1, n);
  if (threads == 1) {
    fn(begin, end);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(static_cast<std::size_t>(threads - 1));
  const int chunk = (n + threads - 1) / threads;
  for (int t = 1; t < threads; ++t) {
    const int lo = begin + t * chunk;
    const int hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  fn(begin, std::min(end, begin + chunk));
}

}  // namespace ctmap
