#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace flatbp::detail {

inline constexpr int64_t kParallelGrain = 2048;

// Static range split. Every index is processed by exactly one thread with a
// fixed iteration order, so results do not depend on the thread count as long
// as distinct indices write distinct outputs.
template <typename Fn>
void parallel_for(int64_t begin, int64_t end, int32_t num_threads, Fn&& fn) {
  const int64_t count = end - begin;
  if (count <= 0) return;
  if (num_threads <= 1 || count < kParallelGrain) {
    for (int64_t i = begin; i < end; ++i) fn(i);
    return;
  }
  const int64_t workers = std::min<int64_t>(num_threads, count);
  const int64_t chunk = (count + workers - 1) / workers;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (int64_t t = 0; t < workers; ++t) {
    const int64_t lo = begin + t * chunk;
    const int64_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([lo, hi, &fn] {
      for (int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : threads) th.join();
}

// Max-reduction over fn(i). Max is order-insensitive, so the combined result
// is identical for any thread count.
template <typename Fn>
double parallel_reduce_max(int64_t begin, int64_t end, int32_t num_threads, double init, Fn&& fn) {
  const int64_t count = end - begin;
  if (count <= 0) return init;
  if (num_threads <= 1 || count < kParallelGrain) {
    double best = init;
    for (int64_t i = begin; i < end; ++i) best = std::max(best, fn(i));
    return best;
  }
  const int64_t workers = std::min<int64_t>(num_threads, count);
  const int64_t chunk = (count + workers - 1) / workers;
  std::vector<double> partial(workers, init);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (int64_t t = 0; t < workers; ++t) {
    const int64_t lo = begin + t * chunk;
    const int64_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([lo, hi, t, &partial, &fn] {
      double best = partial[t];
      for (int64_t i = lo; i < hi; ++i) best = std::max(best, fn(i));
      partial[t] = best;
    });
  }
  for (auto& th : threads) th.join();
  double best = init;
  for (double p : partial) best = std::max(best, p);
  return best;
}

}  // namespace flatbp::detail
