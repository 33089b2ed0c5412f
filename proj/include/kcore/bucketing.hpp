#pragma once

#include <atomic>
#include <bit>
#include <cstdint>
#include <memory>
#include <vector>

#include "kcore/defs.hpp"
#include "kcore/graph.hpp"
#include "kcore/hash_bag.hpp"
#include "kcore/parallel.hpp"
#include "kcore/state.hpp"

namespace kcore {

// Bucket id for induced degree d at round k: eight single-key buckets for
// d-k in [0,8), then exponentially widening ranges [k+8,k+16), [k+16,k+32)...
inline int hbs_index(degree_t d, degree_t k) {
  degree_t rel = d - k;
  if (rel < 8) return static_cast<int>(rel);
  uint64_t block = static_cast<uint64_t>(rel) / 8;
  return 8 + (std::bit_width(block) - 1);
}

// Lowest d-k value a bucket can hold at the round its entries were inserted.
inline degree_t hbs_bucket_low(int b) {
  if (b < 8) return static_cast<degree_t>(b);
  return static_cast<degree_t>(8u << (b - 8));
}

inline int hbs_bucket_count(degree_t dmax) {
  uint64_t blocks = (static_cast<uint64_t>(std::max<degree_t>(dmax, 0)) + 1 + 7) / 8;
  if (blocks < 1) blocks = 1;
  int log = blocks <= 1 ? 0 : std::bit_width(blocks - 1);
  return 8 + std::max(1, log + 1);
}

namespace detail {

inline void atomic_min_i64(int64_t& slot, int64_t v) {
  std::atomic_ref<int64_t> ref(slot);
  int64_t cur = ref.load(std::memory_order_relaxed);
  while (v < cur && !ref.compare_exchange_weak(cur, v, std::memory_order_relaxed)) {
  }
}

}  // namespace detail

// Hierarchical bucketing structure. Entries are lazy copies: moving a vertex
// inserts a fresh copy and leaves the old one to be filtered at extraction.
// Each bucket keeps the smallest round at which it received an insert; the
// bucket cannot contain a key due before (that round + its low offset), so
// extraction skips buckets that provably hold only future keys. That gate is
// what keeps the per-vertex copy count logarithmic.
class HierBuckets {
 public:
  HierBuckets(size_t n, degree_t dmax, uint64_t seed)
      : num_buckets_(hbs_bucket_count(dmax)), insert_count_(n, 0) {
    size_t cap = 3 * n + 64;
    bags_.reserve(static_cast<size_t>(num_buckets_));
    for (int b = 0; b < num_buckets_; ++b)
      bags_.push_back(std::make_unique<HashBag>(cap, mix64(seed, 0xb0cce7 + b)));
    min_insert_round_.assign(static_cast<size_t>(num_buckets_), INT64_MAX);
  }

  int num_buckets() const { return num_buckets_; }
  const std::vector<uint32_t>& insert_counts() const { return insert_count_; }

  void build(const std::vector<vertex_t>& active, const PeelState& st, degree_t k,
             int threads) {
    parallel_for(active.size(), threads, [&](size_t i) {
      vertex_t v = active[i];
      insert_at(v, hbs_index(st.induced[v], k), k);
    });
  }

  // Lazy move: one fresh copy at the key's current bucket.
  void update(vertex_t v, degree_t new_d, degree_t k) { insert_at(v, hbs_index(new_d, k), k); }

  // Called from the peel hook with the decrement's old/new values; inserts
  // only when a bucket boundary was crossed.
  void on_degree_change(vertex_t v, degree_t before, degree_t after, degree_t k) {
    if (hbs_index(before, k) != hbs_index(after, k)) update(v, after, k);
  }

  // Frontier for round k: every live unclaimed vertex with d~ <= k. Scans
  // buckets whose watermark admits due keys; survivors with future keys are
  // re-placed at their current bucket (which the fresh watermark then parks
  // until they can actually be due).
  std::vector<vertex_t> next(degree_t k, PeelState& st, int threads) {
    std::vector<vertex_t> frontier;
    for (;;) {
      int j = -1;
      for (int b = 0; b < num_buckets_; ++b) {
        if (bags_[static_cast<size_t>(b)]->empty()) continue;
        int64_t wm = min_insert_round_[static_cast<size_t>(b)];
        if (wm != INT64_MAX && wm + hbs_bucket_low(b) <= k) {
          j = b;
          break;
        }
      }
      if (j < 0) break;
      min_insert_round_[static_cast<size_t>(j)] = INT64_MAX;
      std::vector<vertex_t> entries = bags_[static_cast<size_t>(j)]->extract_all(threads);
      std::vector<std::vector<vertex_t>> local(static_cast<size_t>(std::max(threads, 1)));
      parallel_for_tasks(entries.size(), threads, [&](size_t i, int tid) {
        vertex_t v = entries[i];
        if (st.peeled(v) || st.claimed[v]) return;  // stale copy
        degree_t d = st.induced[v];
        if (d <= k) {
          if (st.try_claim(v)) local[static_cast<size_t>(tid)].push_back(v);
        } else {
          insert_at(v, hbs_index(d, k), k);
        }
      });
      for (auto& part : local) frontier.insert(frontier.end(), part.begin(), part.end());
    }
    return frontier;
  }

 private:
  void insert_at(vertex_t v, int b, degree_t k) {
    bags_[static_cast<size_t>(b)]->insert(v);
    detail::atomic_min_i64(min_insert_round_[static_cast<size_t>(b)], k);
    std::atomic_ref<uint32_t>(insert_count_[v]).fetch_add(1, std::memory_order_relaxed);
  }

  int num_buckets_;
  std::vector<std::unique_ptr<HashBag>> bags_;
  std::vector<int64_t> min_insert_round_;
  std::vector<uint32_t> insert_count_;
};

// Julienne-style window: every b rounds the active set is partitioned into b
// single-key bags for keys k..k+b-1; everything denser stays in the active
// set (the overflow bucket) until the next rebuild.
class FixedBuckets {
 public:
  FixedBuckets(size_t n, int b, uint64_t seed) : b_(b) {
    size_t cap = 2 * n + 64;
    bags_.reserve(static_cast<size_t>(b));
    for (int i = 0; i < b; ++i)
      bags_.push_back(std::make_unique<HashBag>(cap, mix64(seed, 0xf1bed + i)));
  }

  void rebuild(const std::vector<vertex_t>& active, const PeelState& st, degree_t k,
               int threads) {
    window_start_ = k;
    parallel_for(active.size(), threads, [&](size_t i) {
      vertex_t v = active[i];
      degree_t rel = st.induced[v] - k;
      if (rel >= 0 && rel < b_) bags_[static_cast<size_t>(rel)]->insert(v);
    });
  }

  // Insert a copy when the key lands inside the served window; denser keys
  // stay with the overflow (the active set) until the next rebuild.
  void note_key(vertex_t v, degree_t d) {
    degree_t rel = d - window_start_;
    if (rel >= 0 && rel < b_) bags_[static_cast<size_t>(rel)]->insert(v);
  }

  bool needs_rebuild(degree_t k) const {
    return window_start_ < 0 || k >= window_start_ + b_;
  }

  std::vector<vertex_t> next(degree_t k, PeelState& st, int threads) {
    std::vector<vertex_t> entries =
        bags_[static_cast<size_t>(k - window_start_)]->extract_all(threads);
    std::vector<vertex_t> frontier;
    frontier.reserve(entries.size());
    for (vertex_t v : entries) {
      if (st.peeled(v) || st.claimed[v]) continue;
      if (st.induced[v] <= k && st.try_claim(v)) frontier.push_back(v);
    }
    return frontier;
  }

 private:
  int b_;
  degree_t window_start_ = -1;
  std::vector<std::unique_ptr<HashBag>> bags_;
};

enum class BucketKind { single, fixed, hbs, autoswitch };

struct BucketStrategy {
  BucketKind kind = BucketKind::autoswitch;
  int b = 16;             // bucket count for the fixed strategy
  degree_t theta = 16;    // average-degree / switch-round threshold for auto
};

// Frontier generation facade over the three strategies plus the auto policy:
// plain packing while the graph is sparse, switching to HBS when a
// theta-core is reached (or from the start if the average degree is already
// above theta).
class FrontierGen {
 public:
  FrontierGen(const CsrGraph& g, BucketStrategy strategy, int threads, uint64_t seed)
      : g_(g), strategy_(strategy), threads_(threads), seed_(seed) {
    switch (strategy.kind) {
      case BucketKind::single:
        break;
      case BucketKind::fixed:
        fixed_ = std::make_unique<FixedBuckets>(g.n, strategy.b, seed);
        break;
      case BucketKind::hbs:
        hbs_pending_ = true;
        break;
      case BucketKind::autoswitch: {
        double avg = g.n == 0 ? 0.0 : static_cast<double>(g.m2) / static_cast<double>(g.n);
        if (avg > static_cast<double>(strategy.theta)) hbs_pending_ = true;
        break;
      }
    }
  }

  std::vector<vertex_t> next_frontier(degree_t k, const std::vector<vertex_t>& active,
                                      PeelState& st) {
    if (hbs_pending_ && (strategy_.kind != BucketKind::autoswitch || k == 0)) activate_hbs(active, st, k);
    if (strategy_.kind == BucketKind::autoswitch && !hier_ && k == strategy_.theta)
      activate_hbs(active, st, k);

    if (hier_) return hier_->next(k, st, threads_);
    if (fixed_) {
      if (fixed_->needs_rebuild(k)) fixed_->rebuild(active, st, k, threads_);
      return fixed_->next(k, st, threads_);
    }
    auto frontier = pack(active, threads_, [&](vertex_t v) {
      return !st.peeled(v) && !st.claimed[v] && st.induced[v] <= k;
    });
    parallel_for(frontier.size(), threads_, [&](size_t i) { st.try_claim(frontier[i]); });
    return frontier;
  }

  // Peel hook: a decrement moved v from `before` to `after`, both still
  // above the current round.
  void on_degree_change(vertex_t v, degree_t before, degree_t after, degree_t k) {
    if (hier_) hier_->on_degree_change(v, before, after, k);
    else if (fixed_) fixed_->note_key(v, after);
  }

  // Resample hook: v's degree was rewritten to new_d (> k).
  void on_key_rewrite(vertex_t v, degree_t new_d, degree_t k) {
    if (hier_) hier_->update(v, new_d, k);
    else if (fixed_) fixed_->note_key(v, new_d);
  }

  bool hbs_active() const { return hier_ != nullptr; }
  const HierBuckets* hier() const { return hier_.get(); }

 private:
  void activate_hbs(const std::vector<vertex_t>& active, PeelState& st, degree_t k) {
    hbs_pending_ = false;
    degree_t dmax = g_.max_degree();
    hier_ = std::make_unique<HierBuckets>(g_.n, dmax, seed_);
    hier_->build(active, st, k, threads_);
  }

  const CsrGraph& g_;
  BucketStrategy strategy_;
  int threads_;
  uint64_t seed_;
  bool hbs_pending_ = false;
  std::unique_ptr<FixedBuckets> fixed_;
  std::unique_ptr<HierBuckets> hier_;
};

}  // namespace kcore
