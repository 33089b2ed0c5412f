#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "kcore/bucketing.hpp"
#include "kcore/bz.hpp"
#include "kcore/defs.hpp"
#include "kcore/graph.hpp"
#include "kcore/hash_bag.hpp"
#include "kcore/parallel.hpp"
#include "kcore/peel.hpp"
#include "kcore/sampler.hpp"
#include "kcore/state.hpp"

namespace kcore {

enum class PeelMode { offline, online };

struct PeelConfig {
  PeelMode peel = PeelMode::online;
  bool sampling = false;
  SamplingParams sampling_params{};
  int vgc = 128;  // local queue capacity; 0 disables
  BucketStrategy bucketing{};
  int threads = 0;  // 0 = hardware parallelism
  uint64_t seed = 1;

  // Test instrumentation.
  bool debug_checks = false;
  std::vector<std::vector<vertex_t>>* frontier_trace = nullptr;
  std::vector<uint32_t>* hbs_insert_counts = nullptr;
  bool* hbs_was_built = nullptr;
  std::vector<uint32_t>* hot_updates_out = nullptr;
};

struct PeelStats {
  uint64_t n = 0;
  uint64_t m2 = 0;
  degree_t kmax = 0;
  uint64_t rounds = 0;
  uint64_t subrounds = 0;
  uint64_t decrements = 0;
  uint64_t samples = 0;
  uint64_t resamples = 0;
  uint64_t restarts = 0;
  uint64_t sum_active = 0;
  uint32_t max_hot_updates = 0;
  double wall_ms = 0.0;
};

inline void validate_config(const PeelConfig& cfg) {
  if (cfg.sampling && cfg.peel == PeelMode::offline)
    throw param_error("sampling requires online peeling");
  if (cfg.vgc > 0 && cfg.peel == PeelMode::offline)
    throw param_error("vgc requires online peeling");
  if (cfg.vgc < 0) throw param_error("vgc capacity must be >= 0");
  if (cfg.threads < 0) throw param_error("thread count must be >= 0");
  if (cfg.sampling_params.c < 1) throw param_error("sampling.c must be >= 1");
  if (cfg.bucketing.kind == BucketKind::fixed && cfg.bucketing.b < 1)
    throw param_error("fixed bucketing needs b >= 1");
}

namespace detail {

struct AttemptOutcome {
  bool ok = false;
  PeelStats stats{};
};

class EngineRun {
 public:
  EngineRun(const CsrGraph& g, const PeelConfig& cfg, int threads)
      : g_(g),
        cfg_(cfg),
        threads_(threads),
        next_bag_(g.n, mix64(cfg.seed, 0xba9)),
        resample_bag_(g.n, mix64(cfg.seed, 0xc0c0)),
        counters_(threads),
        queue_storage_(static_cast<size_t>(threads) * std::max(cfg.vgc, 1)) {}

  AttemptOutcome execute(bool sampling, const SamplingParams& sp, uint64_t mu,
                         PeelState& st) {
    AttemptOutcome out;
    st.reset(g_);
    std::vector<vertex_t> active(g_.n);
    std::iota(active.begin(), active.end(), 0u);
    FrontierGen gen(g_, cfg_.bucketing, threads_, mix64(cfg_.seed, 0xbcd));
    std::optional<SamplerCtx> sampler;
    if (sampling) {
      sampler.emplace(g_, sp, mu);
      sampler->init(g_, st, threads_);
    }
    std::optional<HistogramScratch> hist;
    if (cfg_.peel == PeelMode::offline) hist.emplace(g_.n, threads_);

    auto key_hook = [&](vertex_t v, degree_t new_d) {
      gen.on_key_rewrite(v, new_d, round_);
    };
    auto peel_hook = [&](vertex_t v, degree_t before, degree_t after, degree_t k) {
      gen.on_degree_change(v, before, after, k);
    };

    degree_t hard_cap = 2 * g_.max_degree() + 66;
    round_ = 0;
    while (!active.empty()) {
      degree_t k = round_;
      std::vector<vertex_t> frontier = gen.next_frontier(k, active, st);
      if (sampler) {
        if (!sampling_round_prologue(k, g_, st, *sampler, next_bag_, threads_, key_hook))
          return out;  // detected sampling error: restart
        append_extracted(frontier);
      }
      if (cfg_.frontier_trace) {
        auto sorted = frontier;
        std::sort(sorted.begin(), sorted.end());
        cfg_.frontier_trace->push_back(std::move(sorted));
      }
      for (;;) {
        while (!frontier.empty()) {
          ++out.stats.subrounds;
          parallel_for(frontier.size(), threads_,
                       [&](size_t i) { st.peel_round[frontier[i]] = k; }, 256);
          if (cfg_.peel == PeelMode::offline) {
            frontier =
                peel_offline(g_, st, frontier, k, *hist, threads_, counters_, peel_hook);
          } else {
            peel_online(g_, st, frontier, k, cfg_.vgc, threads_, next_bag_,
                        sampler ? &*sampler : nullptr, &resample_bag_, counters_,
                        queue_storage_, peel_hook);
            if (sampler) {
              auto pending = resample_bag_.extract_all(threads_);
              std::atomic<bool> failed{false};
              parallel_for(
                  pending.size(), threads_,
                  [&](size_t i) {
                    if (!resample(pending[i], k, g_, st, *sampler, next_bag_, key_hook))
                      failed.store(true, std::memory_order_relaxed);
                  },
                  16);
              if (failed.load()) return out;
            }
            frontier = next_bag_.extract_all(threads_);
          }
        }
        if (!sampler) break;
        // Rescue sweep before the round closes: a vertex whose degree
        // collapsed past k inside this round has collected enough samples to
        // fail validation now, and this is the last point where it can still
        // be peeled at the correct round. Reinsertions resume the round.
        if (!sampling_round_prologue(k, g_, st, *sampler, next_bag_, threads_, key_hook))
          return out;
        frontier = next_bag_.extract_all(threads_);
        if (frontier.empty()) break;
      }
      out.stats.sum_active += active.size();
      ++out.stats.rounds;
      if (cfg_.debug_checks) boundary_checks(k, st, sampler ? &*sampler : nullptr);
      active = pack(active, threads_, [&](vertex_t v) { return st.induced[v] > k; });
      ++round_;
      if (round_ > hard_cap) throw std::logic_error("peeling did not terminate");
    }

    out.ok = true;
    out.stats.decrements = counters_.total_decrements();
    out.stats.samples = counters_.total_samples();
    out.stats.resamples = sampler ? sampler->resamples() : 0;
    out.stats.max_hot_updates = st.max_hot_updates();
    if (cfg_.hbs_insert_counts && gen.hier()) *cfg_.hbs_insert_counts = gen.hier()->insert_counts();
    if (cfg_.hbs_was_built) *cfg_.hbs_was_built = gen.hbs_active();
    if (cfg_.hot_updates_out) {
      cfg_.hot_updates_out->assign(g_.n, 0);
      for (vertex_t v = 0; v < g_.n; ++v)
        (*cfg_.hot_updates_out)[v] = std::max(
            st.degree_hits[v], std::max(st.sample_hits[v], st.sample_hits_peak[v]));
    }
    return out;
  }

 private:
  void append_extracted(std::vector<vertex_t>& frontier) {
    auto added = next_bag_.extract_all(threads_);
    frontier.insert(frontier.end(), added.begin(), added.end());
  }

  // Debug-only structural checks at the end of round k.
  void boundary_checks(degree_t k, PeelState& st, SamplerCtx* sampler) {
    for (vertex_t v = 0; v < g_.n; ++v) {
      if (st.peeled(v)) continue;
      if (sampler && sampler->in_mode(v)) {
        // Frozen snapshot: d~ must not have moved since the sampler was set.
        if (st.induced[v] != sampler->frozen_of(v))
          throw std::logic_error("sampled vertex degree was written while frozen");
        continue;
      }
      degree_t live = 0;
      for (vertex_t u : g_.neighbors(v))
        if (!st.peeled(u)) ++live;
      if (st.induced[v] != live)
        throw std::logic_error("induced degree drifted from live-neighbor count");
      if (!st.claimed[v] && st.induced[v] <= k)
        throw std::logic_error("unclaimed vertex left at or below the round");
    }
  }

  const CsrGraph& g_;
  const PeelConfig& cfg_;
  int threads_;
  degree_t round_ = 0;
  HashBag next_bag_;
  HashBag resample_bag_;
  ThreadCounters counters_;
  std::vector<vertex_t> queue_storage_;
};

}  // namespace detail

// Full decomposition under the given configuration. Sampling failures are
// recovered internally: the run restarts with a doubled sample target, and
// after two failed restarts sampling is disabled, so the returned coreness
// is always exact.
inline std::pair<CorenessArray, PeelStats> decompose(const CsrGraph& g, PeelConfig cfg) {
  validate_config(cfg);
  int threads = cfg.threads > 0 ? cfg.threads : hardware_threads();
  auto t0 = std::chrono::steady_clock::now();

  SamplingParams sp = cfg.sampling_params;
  sp.seed = cfg.seed;
  uint64_t mu = sp.mu_for(g.n);
  bool sampling = cfg.sampling;
  PeelState st;
  uint64_t restarts = 0;
  detail::AttemptOutcome outcome;
  for (;;) {
    detail::EngineRun run(g, cfg, threads);
    outcome = run.execute(sampling, sp, mu, st);
    if (outcome.ok) break;
    ++restarts;
    if (restarts <= 2)
      mu *= 2;
    else
      sampling = false;
  }

  PeelStats stats = outcome.stats;
  stats.n = g.n;
  stats.m2 = g.m2;
  stats.restarts = restarts;
  stats.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  CorenessArray coreness;
  coreness.values.assign(g.n, 0);
  for (vertex_t v = 0; v < g.n; ++v) coreness.values[v] = st.peel_round[v];
  stats.kmax = coreness.kmax();
  return {std::move(coreness), stats};
}

// Refine the active set after round k, adding |A| to the running total
// first. Exposed for tests; decompose() inlines the same step.
inline std::vector<vertex_t> refine_active(const std::vector<vertex_t>& active,
                                           const PeelState& st, degree_t k, int threads,
                                           uint64_t* sum_active = nullptr) {
  if (sum_active) *sum_active += active.size();
  return pack(active, threads, [&](vertex_t v) { return st.induced[v] > k; });
}

// Maximum k'-core: peel with the round pinned until no vertex below k'
// remains; survivors are the subgraph. One conceptual round at k'-1 gives
// exactly that (a decrement claims its target when it drops below k').
inline std::vector<vertex_t> kcore_subgraph(const CsrGraph& g, degree_t kprime,
                                            PeelConfig cfg) {
  if (kprime < 0) throw param_error("kprime must be >= 0");
  cfg.sampling = false;
  validate_config(cfg);
  int threads = cfg.threads > 0 ? cfg.threads : hardware_threads();
  PeelState st;
  st.reset(g);
  degree_t k = kprime - 1;
  std::vector<vertex_t> all(g.n);
  std::iota(all.begin(), all.end(), 0u);
  std::vector<vertex_t> frontier =
      pack(all, threads, [&](vertex_t v) { return st.induced[v] <= k; });
  for (vertex_t v : frontier) st.claimed[v] = 1;

  HashBag next_bag(g.n, mix64(cfg.seed, 0xba9));
  ThreadCounters counters(threads);
  std::vector<vertex_t> queue_storage(static_cast<size_t>(threads) * std::max(cfg.vgc, 1));
  std::optional<HistogramScratch> hist;
  if (cfg.peel == PeelMode::offline) hist.emplace(g.n, threads);
  while (!frontier.empty()) {
    parallel_for(frontier.size(), threads,
                 [&](size_t i) { st.peel_round[frontier[i]] = std::max<degree_t>(k, 0); }, 256);
    if (cfg.peel == PeelMode::offline) {
      frontier = peel_offline(g, st, frontier, k, *hist, threads, counters);
    } else {
      peel_online(g, st, frontier, k, cfg.vgc, threads, next_bag, nullptr, nullptr,
                  counters, queue_storage);
      frontier = next_bag.extract_all(threads);
    }
  }
  return pack(all, threads, [&](vertex_t v) { return !st.peeled(v); });
}

}  // namespace kcore
