#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <vector>

#include "kcore/defs.hpp"
#include "kcore/graph.hpp"
#include "kcore/hash_bag.hpp"
#include "kcore/parallel.hpp"
#include "kcore/state.hpp"

namespace kcore {

struct SamplingParams {
  // Confidence constant; the sample target is ceil(4*(c+2)*ln n).
  int c = 1;
  // Reduce fraction: a sampler is expected to cover the drop from d~ to
  // r*d~ before it is reset.
  double r = 0.10;
  // Minimum-degree gate: sample mode requires r*d~ > max(threshold, k).
  degree_t threshold = 16;
  uint64_t seed = 1;

  // Test hooks. mu_override pins the sample target; rate_override pins the
  // coin probability (the rate formula is bypassed).
  uint64_t mu_override = 0;
  double rate_override = -1.0;

  uint64_t mu_for(uint64_t n) const {
    if (mu_override > 0) return mu_override;
    if (n < 2) return 1;
    double mu = 4.0 * (c + 2) * std::log(static_cast<double>(n));
    return std::max<uint64_t>(1, static_cast<uint64_t>(std::ceil(mu)));
  }
};

// Per-vertex sampling state sigma[v]. While enabled, d~[v] is frozen at the
// value it had when the sampler was last set.
struct Sampler {
  bool enabled = false;
  double rate = 0.0;
  int32_t count = 0;
};

inline Sampler set_sampler(degree_t induced_v, degree_t k, const SamplingParams& p,
                           uint64_t mu) {
  Sampler s;
  double gate = p.r * static_cast<double>(induced_v);
  if (gate > static_cast<double>(std::max(p.threshold, k))) {
    s.enabled = true;
    s.rate = p.rate_override >= 0.0
                 ? p.rate_override
                 : std::min(1.0, static_cast<double>(mu) /
                                     ((1.0 - p.r) * static_cast<double>(induced_v)));
    s.count = 0;
  }
  return s;
}

// Safe-to-stay-sampled check. frozen_d is the induced degree snapshot taken
// at the last sampler reset. False means a resample is required.
inline bool validate(const Sampler& s, degree_t k, degree_t frozen_d, const SamplingParams& p) {
  if (static_cast<double>(k) >= p.r * static_cast<double>(frozen_d)) return false;
  double bound = static_cast<double>(frozen_d - k) * s.rate / 4.0;
  return static_cast<double>(s.count) < bound;
}

// Shared sampling state for one decomposition attempt.
class SamplerCtx {
 public:
  SamplerCtx(const CsrGraph& g, const SamplingParams& params, uint64_t mu)
      : params_(params),
        mu_(mu),
        enabled_(g.n, 0),
        rate_(g.n, 0.0),
        count_(g.n, 0),
        frozen_(g.n, 0) {}

  // SetSampler(v, 0) for every vertex; builds the compact mode-on list.
  void init(const CsrGraph& g, PeelState& st, int threads) {
    parallel_for(g.n, threads, [&](size_t v) {
      apply(static_cast<vertex_t>(v), set_sampler(st.induced[v], 0, params_, mu_),
            st.induced[v]);
    });
    sampled_.clear();
    for (vertex_t v = 0; v < g.n; ++v)
      if (enabled_[v]) sampled_.push_back(v);
  }

  bool in_mode(vertex_t v) const { return enabled_[v] != 0; }
  double rate_of(vertex_t v) const { return rate_[v]; }
  int32_t count_of(vertex_t v) const { return count_[v]; }
  int32_t count_relaxed(vertex_t v) const {
    return std::atomic_ref<const int32_t>(count_[v]).load(std::memory_order_relaxed);
  }
  uint64_t mu() const { return mu_; }
  const SamplingParams& params() const { return params_; }
  std::vector<vertex_t>& sampled_list() { return sampled_; }

  void apply(vertex_t v, const Sampler& s, degree_t frozen_d) {
    enabled_[v] = s.enabled ? 1 : 0;
    rate_[v] = s.rate;
    count_[v] = s.count;
    frozen_[v] = frozen_d;
  }

  // Induced degree at the moment v's sampler was last set.
  degree_t frozen_of(vertex_t v) const { return frozen_[v]; }

  Sampler get(vertex_t v) const { return {enabled_[v] != 0, rate_[v], count_[v]}; }

  // One independent coin for a directed slot (the slot id is unique per
  // peeled vertex/neighbor pair, so coins are reproducible across schedules
  // and thread counts).
  bool coin(uint64_t slot, vertex_t target) const {
    double p = rate_[target];
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    uint64_t thr = static_cast<uint64_t>(p * 18446744073709551616.0);
    return mix64(params_.seed, slot) < thr;
  }

  // Atomic head count; returns the post-increment value.
  int32_t add_sample(vertex_t v) {
    return std::atomic_ref<int32_t>(count_[v]).fetch_add(1, std::memory_order_relaxed) + 1;
  }

  void note_resample() { resamples_.fetch_add(1, std::memory_order_relaxed); }
  uint64_t resamples() const { return resamples_.load(std::memory_order_relaxed); }

 private:
  SamplingParams params_;
  uint64_t mu_;
  std::vector<uint8_t> enabled_;
  std::vector<double> rate_;
  std::vector<int32_t> count_;
  std::vector<degree_t> frozen_;
  std::vector<vertex_t> sampled_;
  std::atomic<uint64_t> resamples_{0};
};

// Recount v's true induced degree and either queue it for peeling, flag the
// low-probability sampling failure, or re-arm its sampler. Must run at a
// phase boundary (no concurrent peeling around v). KeyHook is told about
// the degree rewrite when v stays live so bucketing structures can follow.
// Returns false on a detected error.
template <class KeyHook>
bool resample(vertex_t v, degree_t k, const CsrGraph& g, PeelState& st, SamplerCtx& ctx,
              HashBag& frontier_sink, KeyHook&& key_hook) {
  ctx.note_resample();
  st.fold_sample_hits(v);
  if (st.peeled(v) || st.claimed[v]) {
    ctx.apply(v, Sampler{}, st.induced[v]);
    return true;
  }
  // Neighbors without an assigned round have not executed their decrement on
  // v yet (claimed-but-pending ones will once they are processed), so they
  // all count toward the restored induced degree.
  degree_t current = 0;   // neighbors with no coreness assigned
  degree_t previous = 0;  // neighbors with coreness >= k (or still unassigned)
  for (vertex_t u : g.neighbors(v)) {
    degree_t e = st.peel_round[u];
    if (e == kNotPeeled) {
      ++current;
      ++previous;
    } else if (e == k) {
      ++previous;
    }
  }
  st.induced[v] = current;
  if (current <= k) {
    if (previous < k) return false;  // missed peeling round: restart needed
    ctx.apply(v, Sampler{}, current);
    if (st.try_claim(v)) frontier_sink.insert(v);
    return true;
  }
  ctx.apply(v, set_sampler(current, k, ctx.params(), ctx.mu()), current);
  key_hook(v, current);
  return true;
}

// Round prologue: every vertex still in sample mode is validated, and the
// unsafe ones are resampled. Returns false if any resample detected an
// error.
template <class KeyHook>
bool sampling_round_prologue(degree_t k, const CsrGraph& g, PeelState& st, SamplerCtx& ctx,
                             HashBag& frontier_sink, int threads, KeyHook&& key_hook) {
  auto& list = ctx.sampled_list();
  list = pack(list, threads, [&](vertex_t v) { return ctx.in_mode(v); });
  std::atomic<bool> failed{false};
  parallel_for(
      list.size(), threads,
      [&](size_t i) {
        vertex_t v = list[i];
        Sampler s = ctx.get(v);
        if (!validate(s, k, st.induced[v], ctx.params())) {
          if (!resample(v, k, g, st, ctx, frontier_sink, key_hook))
            failed.store(true, std::memory_order_relaxed);
        }
      },
      64);
  return !failed.load();
}

}  // namespace kcore
