#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace dlab {

// Work-stealing replica driver. Each replica's stream is keyed by its
// index, and results land in index order, so output is independent of
// the worker count and of scheduling.
template <class T, class Fn>
std::vector<T> run_replicas(int64_t replicas, int workers, Fn&& fn) {
  std::vector<T> out(static_cast<size_t>(replicas));
  if (replicas == 0) return out;
  if (workers <= 1) {
    for (int64_t i = 0; i < replicas; ++i) out[static_cast<size_t>(i)] = fn(i);
    return out;
  }
  std::atomic<int64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        int64_t i = next.fetch_add(1);
        if (i >= replicas) return;
        out[static_cast<size_t>(i)] = fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace dlab
