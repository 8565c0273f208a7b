#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace kinhybrid {

/// Splits [0, count) into `workers` contiguous chunks and runs
/// fn(begin, end, worker) on each. Chunk boundaries depend only on count and
/// workers. With one worker the call runs inline.
template <typename Fn>
void for_each_chunk(std::size_t count, int workers, Fn&& fn) {
  const auto w = static_cast<std::size_t>(std::max(1, workers));
  if (w == 1 || count < 2) {
    fn(std::size_t{0}, count, 0);
    return;
  }
  const std::size_t chunk = (count + w - 1) / w;
  std::vector<std::jthread> threads;
  threads.reserve(w);
  for (std::size_t k = 0; k < w; ++k) {
    const std::size_t begin = std::min(count, k * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    threads.emplace_back([&fn, begin, end, k] { fn(begin, end, static_cast<int>(k)); });
  }
}

}  // namespace kinhybrid
