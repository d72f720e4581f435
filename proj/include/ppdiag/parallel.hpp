#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace ppdiag {

// Runs fn(i) for i in [0, n), optionally across threads. Callers write into
// pre-sized slots indexed by i and reduce sequentially afterwards, so the
// thread count never changes results. fn must not throw.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t worker_count = std::min<std::size_t>(threads, n);
  std::vector<std::thread> workers;
  workers.reserve(worker_count);
  for (std::size_t w = 0; w < worker_count; ++w) {
    workers.emplace_back([&, w]() {
      for (std::size_t i = w; i < n; i += worker_count) fn(i);
    });
  }
  for (auto& t : workers) t.join();
}

}  // namespace ppdiag
