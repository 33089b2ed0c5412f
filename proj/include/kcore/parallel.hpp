#pragma once

#include <omp.h>

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <thread>
#include <vector>

#include "kcore/defs.hpp"

namespace kcore {

inline int hardware_threads() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Parallel loop over [0, n). Single-threaded calls bypass OpenMP entirely
// so t=1 runs have no scheduling overhead and are easy to debug.
template <class F>
void parallel_for(size_t n, int threads, F&& f, size_t grain = 1024) {
  if (threads <= 1 || n <= grain) {
    for (size_t i = 0; i < n; ++i) f(i);
    return;
  }
#pragma omp parallel for num_threads(threads) schedule(dynamic, grain)
  for (size_t i = 0; i < n; ++i) f(i);
}

// Loop where each iteration may do very uneven work (local searches).
template <class F>
void parallel_for_tasks(size_t n, int threads, F&& f) {
  if (threads <= 1 || n < 32) {
    for (size_t i = 0; i < n; ++i) f(i, 0);
    return;
  }
#pragma omp parallel num_threads(threads)
  {
    int tid = omp_get_thread_num();
#pragma omp for schedule(dynamic, 16)
    for (size_t i = 0; i < n; ++i) f(i, tid);
  }
}

// Parallel filter keeping input order (block count + prefix + fill).
template <class T, class Pred>
std::vector<T> pack(const std::vector<T>& in, int threads, Pred&& pred) {
  size_t n = in.size();
  if (threads <= 1 || n < 4096) {
    std::vector<T> out;
    out.reserve(n / 2);
    for (size_t i = 0; i < n; ++i)
      if (pred(in[i])) out.push_back(in[i]);
    return out;
  }
  size_t blocks = static_cast<size_t>(threads) * 4;
  size_t block_size = (n + blocks - 1) / blocks;
  std::vector<size_t> counts(blocks + 1, 0);
#pragma omp parallel for num_threads(threads) schedule(static)
  for (size_t b = 0; b < blocks; ++b) {
    size_t lo = b * block_size, hi = std::min(n, lo + block_size);
    size_t c = 0;
    for (size_t i = lo; i < hi; ++i) c += pred(in[i]) ? 1 : 0;
    counts[b + 1] = c;
  }
  for (size_t b = 0; b < blocks; ++b) counts[b + 1] += counts[b];
  std::vector<T> out(counts[blocks]);
#pragma omp parallel for num_threads(threads) schedule(static)
  for (size_t b = 0; b < blocks; ++b) {
    size_t lo = b * block_size, hi = std::min(n, lo + block_size);
    size_t pos = counts[b];
    for (size_t i = lo; i < hi; ++i)
      if (pred(in[i])) out[pos++] = in[i];
  }
  return out;
}

// Per-thread event counters, padded to avoid false sharing.
struct ThreadCounters {
  struct alignas(64) Slot {
    uint64_t decrements = 0;
    uint64_t samples = 0;
  };
  std::vector<Slot> slots;

  explicit ThreadCounters(int threads) : slots(static_cast<size_t>(threads)) {}
  Slot& at(int tid) { return slots[static_cast<size_t>(tid)]; }
  uint64_t total_decrements() const {
    uint64_t s = 0;
    for (auto& c : slots) s += c.decrements;
    return s;
  }
  uint64_t total_samples() const {
    uint64_t s = 0;
    for (auto& c : slots) s += c.samples;
    return s;
  }
};

}  // namespace kcore
