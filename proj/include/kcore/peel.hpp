#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "kcore/defs.hpp"
#include "kcore/graph.hpp"
#include "kcore/hash_bag.hpp"
#include "kcore/parallel.hpp"
#include "kcore/sampler.hpp"
#include "kcore/state.hpp"

namespace kcore {

// No-op bucketing hook for strategies that do not track degree movement.
struct NullKeyHook {
  void operator()(vertex_t, degree_t, degree_t, degree_t) const {}
  void operator()(vertex_t, degree_t) const {}
};

// Per-thread stamped counting buffers for the offline histogram. Buffers are
// epoch-stamped so nothing is cleared between subrounds.
class HistogramScratch {
 public:
  HistogramScratch(size_t n, int threads) : n_(n), threads_(threads) {
    counts_.assign(static_cast<size_t>(threads), {});
    stamps_.assign(static_cast<size_t>(threads), {});
    touched_.assign(static_cast<size_t>(threads), {});
    for (int t = 0; t < threads; ++t) {
      counts_[static_cast<size_t>(t)].assign(n, 0);
      stamps_[static_cast<size_t>(t)].assign(n, 0);
    }
    owner_stamp_.assign(n, 0);
    pairs_.assign(static_cast<size_t>(threads), {});
  }

  // Exact multiplicity of every distinct id in `ids`. The result set is
  // schedule-independent; order is not specified.
  std::vector<std::pair<vertex_t, int32_t>> count(std::span<const vertex_t> ids) {
    ++epoch_;
    size_t total = ids.size();
    size_t chunk = (total + static_cast<size_t>(threads_) - 1) / static_cast<size_t>(threads_);
    if (chunk == 0) chunk = 1;
#pragma omp parallel num_threads(threads_) if (threads_ > 1)
    {
      int tid = threads_ > 1 ? omp_get_thread_num() : 0;
      auto& cnt = counts_[static_cast<size_t>(tid)];
      auto& stamp = stamps_[static_cast<size_t>(tid)];
      auto& touched = touched_[static_cast<size_t>(tid)];
      touched.clear();
      size_t lo = static_cast<size_t>(tid) * chunk;
      size_t hi = std::min(total, lo + chunk);
      for (size_t i = lo; i < hi; ++i) {
        vertex_t u = ids[i];
        if (stamp[u] != epoch_) {
          stamp[u] = epoch_;
          cnt[u] = 0;
          touched.push_back(u);
        }
        ++cnt[u];
      }
    }
    // Merge by key: the first buffer to claim a vertex sums all buffers.
#pragma omp parallel num_threads(threads_) if (threads_ > 1)
    {
      int tid = threads_ > 1 ? omp_get_thread_num() : 0;
      auto& out = pairs_[static_cast<size_t>(tid)];
      out.clear();
      for (vertex_t u : touched_[static_cast<size_t>(tid)]) {
        uint32_t expect = owner_stamp_[u];
        if (expect == epoch_) continue;
        if (!std::atomic_ref<uint32_t>(owner_stamp_[u])
                 .compare_exchange_strong(expect, epoch_, std::memory_order_relaxed))
          continue;
        int32_t f = 0;
        for (int t = 0; t < threads_; ++t) {
          auto& st = stamps_[static_cast<size_t>(t)];
          if (st[u] == epoch_) f += counts_[static_cast<size_t>(t)][u];
        }
        out.emplace_back(u, f);
      }
    }
    std::vector<std::pair<vertex_t, int32_t>> merged;
    size_t sz = 0;
    for (auto& p : pairs_) sz += p.size();
    merged.reserve(sz);
    for (auto& p : pairs_) merged.insert(merged.end(), p.begin(), p.end());
    return merged;
  }

 private:
  size_t n_;
  int threads_;
  uint32_t epoch_ = 0;
  std::vector<std::vector<int32_t>> counts_;
  std::vector<std::vector<uint32_t>> stamps_;
  std::vector<std::vector<vertex_t>> touched_;
  std::vector<uint32_t> owner_stamp_;
  std::vector<std::vector<std::pair<vertex_t, int32_t>>> pairs_;
};

// Convenience entry point for callers without persistent scratch.
inline std::vector<std::pair<vertex_t, int32_t>> histogram(std::span<const vertex_t> ids,
                                                           size_t n, int threads = 1) {
  HistogramScratch scratch(n, threads);
  return scratch.count(ids);
}

// Batch-synchronous subround: gather all neighbor occurrences, count them,
// and apply each vertex's full decrement once. Race-free; every d~ entry is
// written by exactly one task.
template <class KeyHook = NullKeyHook>
std::vector<vertex_t> peel_offline(const CsrGraph& g, PeelState& st,
                                   const std::vector<vertex_t>& frontier, degree_t k,
                                   HistogramScratch& scratch, int threads,
                                   ThreadCounters& tc, KeyHook&& hook = {}) {
  size_t fsz = frontier.size();
  std::vector<uint64_t> offs(fsz + 1, 0);
  for (size_t i = 0; i < fsz; ++i)
    offs[i + 1] = offs[i] + static_cast<uint64_t>(g.degree(frontier[i]));
  std::vector<vertex_t> gathered(offs[fsz]);
  parallel_for(fsz, threads, [&](size_t i) {
    auto nbrs = g.neighbors(frontier[i]);
    std::copy(nbrs.begin(), nbrs.end(), gathered.begin() + static_cast<int64_t>(offs[i]));
  }, 64);
  auto pairs = scratch.count(gathered);

  std::vector<std::vector<vertex_t>> next_local(static_cast<size_t>(threads));
  parallel_for_tasks(pairs.size(), threads, [&](size_t i, int tid) {
    auto [u, f] = pairs[i];
    if (st.induced[u] > k) {
      degree_t before = st.induced[u];
      degree_t after = before - f;
      st.induced[u] = after;
      st.count_degree_hit(u);
      tc.at(tid).decrements += static_cast<uint64_t>(f);
      if (after <= k) {
        if (st.try_claim(u)) next_local[static_cast<size_t>(tid)].push_back(u);
      } else {
        hook(u, before, after, k);
      }
    }
  });
  std::vector<vertex_t> next;
  for (auto& loc : next_local) next.insert(next.end(), loc.begin(), loc.end());
  return next;
}

// Bounded task-private FIFO for vertical granularity control.
class LocalQueue {
 public:
  LocalQueue(vertex_t* buf, int cap) : buf_(buf), cap_(cap) {}
  bool has_room() const { return count_ < cap_; }
  bool empty() const { return count_ == 0; }
  void push(vertex_t v) {
    buf_[(head_ + count_) % cap_] = v;
    ++count_;
  }
  vertex_t pop() {
    vertex_t v = buf_[head_];
    head_ = (head_ + 1) % cap_;
    --count_;
    return v;
  }

 private:
  vertex_t* buf_;
  int cap_;
  int head_ = 0;
  int count_ = 0;
};

// Asynchronous subround: every frontier vertex's neighbors are decremented
// with atomic fetch-and-sub; the decrement that observes k+1 claims the
// neighbor. With vgc_cap > 0, claims are drained through a task-private
// FIFO so chains resolve inside the subround; overflow spills to the next
// frontier. With a sampling context, neighbors in sample mode take a coin
// instead of a decrement, and the coin that completes the sample target
// queues the vertex for resampling.
template <class KeyHook = NullKeyHook>
void peel_online(const CsrGraph& g, PeelState& st, const std::vector<vertex_t>& frontier,
                 degree_t k, int vgc_cap, int threads, HashBag& next_bag,
                 SamplerCtx* sampling, HashBag* resample_set, ThreadCounters& tc,
                 std::vector<vertex_t>& queue_storage, KeyHook&& hook = {}) {
  int32_t mu = 0;
  if (sampling)
    mu = static_cast<int32_t>(std::min<uint64_t>(sampling->mu(), INT32_MAX));

  auto process = [&](vertex_t v, LocalQueue& queue, ThreadCounters::Slot& counters) {
    auto nbrs = g.neighbors(v);
    uint64_t slot_base = g.offsets[v];
    for (size_t i = 0; i < nbrs.size(); ++i) {
      vertex_t u = nbrs[i];
      if (sampling && sampling->in_mode(u)) {
        // A full counter is already queued for resampling; further heads
        // would be discarded at the reset anyway.
        if (sampling->count_relaxed(u) < mu && sampling->coin(slot_base + i, u)) {
          ++counters.samples;
          st.count_sample_hit(u);
          if (sampling->add_sample(u) == mu) resample_set->insert(u);
        }
        continue;
      }
      degree_t before = st.atomic_dec(u);
      ++counters.decrements;
      if (before == k + 1) {
        if (st.try_claim(u)) {
          if (queue.has_room())
            queue.push(u);
          else
            next_bag.insert(u);
        }
      } else if (before > k + 1) {
        hook(u, before, before - 1, k);
      }
    }
  };

  auto task = [&](size_t i, int tid) {
    LocalQueue queue(queue_storage.data() + static_cast<size_t>(tid) * std::max(vgc_cap, 1),
                     vgc_cap);
    auto& counters = tc.at(tid);
    process(frontier[i], queue, counters);
    while (!queue.empty()) {
      vertex_t u = queue.pop();
      st.peel_round[u] = k;
      process(u, queue, counters);
    }
  };
  parallel_for_tasks(frontier.size(), threads, task);
}

}  // namespace kcore
