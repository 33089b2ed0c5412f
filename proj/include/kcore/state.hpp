#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

#include "kcore/defs.hpp"
#include "kcore/graph.hpp"

namespace kcore {

// Flat per-vertex arrays shared by the peel strategies. Everything is
// indexed by vertex id; the documented atomics go through atomic_ref.
//
// Contention instrumentation counts the atomic updates that land on each of
// a vertex's two hot fields (the induced degree and the sample counter),
// tracked separately since they are distinct memory locations. The sample
// counter is logically replaced whenever the sampler is reset, and updates
// on the two sides of that reset barrier are never concurrent, so its
// figure is the peak across sampler instances; the degree field has no such
// resets and reports its whole-run total.
struct PeelState {
  // Current induced degree d~[v]; frozen while v is in sample mode.
  std::vector<degree_t> induced;
  // Round at which v was peeled (this is the coreness), or kNotPeeled.
  std::vector<degree_t> peel_round;
  // Set once when v is claimed for some frontier; never cleared in a run.
  std::vector<uint8_t> claimed;
  std::vector<uint32_t> degree_hits;
  std::vector<uint32_t> sample_hits;
  std::vector<uint32_t> sample_hits_peak;

  void reset(const CsrGraph& g) {
    size_t n = g.n;
    induced.resize(n);
    for (vertex_t v = 0; v < n; ++v) induced[v] = g.degree(v);
    peel_round.assign(n, kNotPeeled);
    claimed.assign(n, 0);
    degree_hits.assign(n, 0);
    sample_hits.assign(n, 0);
    sample_hits_peak.assign(n, 0);
  }

  // Folds the finished sampler instance's counter into the peak. Runs at
  // the resample barrier, exclusive per vertex.
  void fold_sample_hits(vertex_t v) {
    sample_hits_peak[v] = std::max(sample_hits_peak[v], sample_hits[v]);
    sample_hits[v] = 0;
  }

  bool peeled(vertex_t v) const { return peel_round[v] != kNotPeeled; }
  bool live_unclaimed(vertex_t v) const { return !claimed[v]; }

  // Atomic decrement of d~[u]; returns the value before the decrement.
  degree_t atomic_dec(vertex_t u) {
    count_degree_hit(u);
    return std::atomic_ref<degree_t>(induced[u]).fetch_sub(1, std::memory_order_relaxed);
  }

  void count_degree_hit(vertex_t u) {
    std::atomic_ref<uint32_t>(degree_hits[u]).fetch_add(1, std::memory_order_relaxed);
  }
  void count_sample_hit(vertex_t u) {
    std::atomic_ref<uint32_t>(sample_hits[u]).fetch_add(1, std::memory_order_relaxed);
  }

  // Claim-once mark; true exactly for the caller that flips it.
  bool try_claim(vertex_t v) {
    uint8_t expect = 0;
    return std::atomic_ref<uint8_t>(claimed[v])
        .compare_exchange_strong(expect, 1, std::memory_order_relaxed);
  }

  uint32_t max_hot_updates() const {
    uint32_t m = 0;
    for (uint32_t h : degree_hits) m = std::max(m, h);
    for (size_t v = 0; v < sample_hits.size(); ++v)
      m = std::max(m, std::max(sample_hits[v], sample_hits_peak[v]));
    return m;
  }
};

}  // namespace kcore
