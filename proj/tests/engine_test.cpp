#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kcore/engine.hpp"
#include "test_util.hpp"

using namespace kcore;

TEST(ConfigValidation, IllegalCombosRejected) {
  PeelConfig cfg;
  cfg.peel = PeelMode::offline;
  cfg.sampling = true;
  cfg.vgc = 0;
  EXPECT_THROW(validate_config(cfg), param_error);
  cfg.sampling = false;
  cfg.vgc = 128;
  EXPECT_THROW(validate_config(cfg), param_error);
  cfg.vgc = 0;
  EXPECT_NO_THROW(validate_config(cfg));
}

TEST(Decompose, CliqueUnderEveryConfig) {
  CsrGraph g = testutil::clique(4);
  for (const auto& cfg : testutil::legal_configs()) {
    auto [k, stats] = decompose(g, cfg);
    EXPECT_EQ(k.values, (std::vector<degree_t>(4, 3)));
    EXPECT_EQ(stats.kmax, 3);
  }
}

TEST(Decompose, EmptyGraph) {
  CsrGraph g;
  g.offsets = {0};
  auto [k, stats] = decompose(g, PeelConfig{});
  EXPECT_TRUE(k.values.empty());
  EXPECT_EQ(stats.rounds, 0u);
  EXPECT_EQ(stats.kmax, 0);
}

TEST(Decompose, HighCorenessProfileAcrossMatrix) {
  CsrGraph g = gen_hcns(50, 3);
  CorenessArray truth = bz_coreness(g);
  for (const auto& cfg : testutil::legal_configs()) {
    auto [k, stats] = decompose(g, cfg);
    EXPECT_EQ(k, truth);
  }
}

TEST(Decompose, RoundsEqualKmaxPlusOne) {
  CsrGraph g = testutil::er_graph(150, 6.0, 2);
  auto [k, stats] = decompose(g, PeelConfig{});
  EXPECT_EQ(stats.rounds, static_cast<uint64_t>(stats.kmax) + 1);
}

TEST(Decompose, WorkEfficiencyWitness) {
  for (uint64_t seed = 0; seed < 6; ++seed) {
    CsrGraph g = testutil::er_graph(200, 8.0, 300 + seed);
    for (const auto& cfg : testutil::legal_configs(seed)) {
      auto [k, stats] = decompose(g, cfg);
      uint64_t expected = 0;
      for (degree_t c : k.values) expected += 1 + static_cast<uint64_t>(c);
      EXPECT_EQ(stats.sum_active, expected);
      EXPECT_LE(stats.sum_active, g.n + g.m2);
      if (!cfg.sampling) EXPECT_LE(stats.decrements, g.m2);
    }
  }
}

TEST(Decompose, OutputDeterministicAcrossThreadCounts) {
  CsrGraph g = testutil::er_graph(250, 9.0, 77);
  for (const auto& base : testutil::legal_configs()) {
    CorenessArray reference;
    bool first = true;
    for (int threads : {1, 4, 8}) {
      PeelConfig cfg = base;
      cfg.threads = threads;
      auto [k, stats] = decompose(g, cfg);
      if (first) {
        reference = k;
        first = false;
      } else {
        EXPECT_EQ(k, reference);
      }
    }
    EXPECT_TRUE(verify_coreness(g, reference).pass);
  }
}

TEST(Decompose, DebugChecksHoldOnMixedConfigs) {
  CsrGraph g = testutil::er_graph(120, 10.0, 8);
  for (auto cfg : testutil::legal_configs()) {
    cfg.debug_checks = true;
    cfg.threads = 2;
    auto [k, stats] = decompose(g, cfg);
    EXPECT_TRUE(verify_coreness(g, k).pass);
  }
}

TEST(RefineActive, FiltersByInducedDegree) {
  CsrGraph g = testutil::make_graph(2, {});
  PeelState st;
  st.reset(g);
  st.induced = {0, 3};
  uint64_t sum = 0;
  auto refined = refine_active({0, 1}, st, 0, 1, &sum);
  EXPECT_EQ(refined, (std::vector<vertex_t>{1}));
  EXPECT_EQ(sum, 2u);
  auto drained = refine_active(refined, st, 3, 1, &sum);
  EXPECT_TRUE(drained.empty());
  EXPECT_EQ(sum, 3u);
}

TEST(KcoreSubgraph, HcnsTopCore) {
  CsrGraph g = gen_hcns(3, 11);
  auto members = kcore_subgraph(g, 3, PeelConfig{});
  std::sort(members.begin(), members.end());
  EXPECT_EQ(members, (std::vector<vertex_t>{0, 1, 2, 3}));
}

TEST(KcoreSubgraph, ZeroKeepsEverything) {
  CsrGraph g = testutil::er_graph(80, 3.0, 4);
  EXPECT_EQ(kcore_subgraph(g, 0, PeelConfig{}).size(), g.n);
}

TEST(KcoreSubgraph, TreeHasNoTwoCore) {
  CsrGraph g = testutil::star(6);
  EXPECT_TRUE(kcore_subgraph(g, 2, PeelConfig{}).empty());
}

TEST(KcoreSubgraph, MatchesCorenessFilter) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    CsrGraph g = testutil::er_graph(160, 7.0, 500 + seed);
    CorenessArray truth = bz_coreness(g);
    for (degree_t kprime : {0, 1, 2, truth.kmax(), truth.kmax() + 1}) {
      for (auto cfg : {PeelConfig{}, [] {
             PeelConfig c;
             c.peel = PeelMode::offline;
             c.vgc = 0;
             return c;
           }()}) {
        auto members = kcore_subgraph(g, kprime, cfg);
        std::vector<vertex_t> expected;
        for (vertex_t v = 0; v < g.n; ++v)
          if (truth.values[v] >= kprime) expected.push_back(v);
        std::sort(members.begin(), members.end());
        EXPECT_EQ(members, expected) << "kprime " << kprime;
        // Survivors induce a subgraph of minimum degree >= kprime.
        std::vector<bool> in(g.n, false);
        for (vertex_t v : members) in[v] = true;
        for (vertex_t v : members) {
          degree_t inside = 0;
          for (vertex_t u : g.neighbors(v))
            if (in[u]) ++inside;
          EXPECT_GE(inside, kprime);
        }
      }
    }
  }
}

TEST(RestartPolicy, MuDoublesThenSamplingDisables) {
  // Persistent coin starvation forces the full recovery ladder.
  EdgeList e;
  e.n = 261;
  for (vertex_t u = 1; u <= 200; ++u) e.edges.emplace_back(0, u);
  for (vertex_t a = 201; a < 261; ++a)
    for (vertex_t b = a + 1; b < 261; ++b) e.edges.emplace_back(a, b);
  CsrGraph g = from_edges(e);
  PeelConfig cfg;
  cfg.sampling = true;
  cfg.sampling_params.mu_override = 4;
  cfg.sampling_params.rate_override = 1e-12;
  auto [k, stats] = decompose(g, cfg);
  EXPECT_EQ(stats.restarts, 3u);  // two doubled retries, then sampling off
  EXPECT_TRUE(verify_coreness(g, k).pass);
}

// Per-vertex contention stays below alpha*(kappa[v] + ln n) + threshold/r
// with a pinned constant, while the unsampled run pays full degree on hubs.
TEST(Stats, ContentionBoundPerVertex) {
  constexpr double kAlpha = 8.0;
  CsrGraph g = gen_ba(20000, 12, 4);
  PeelConfig cfg;
  cfg.sampling = true;
  cfg.threads = 2;
  std::vector<uint32_t> hot;
  cfg.hot_updates_out = &hot;
  auto [k, stats] = decompose(g, cfg);
  ASSERT_TRUE(verify_coreness(g, k).pass);
  double logn = std::log(static_cast<double>(g.n));
  double slack = static_cast<double>(cfg.sampling_params.threshold) / cfg.sampling_params.r;
  for (vertex_t v = 0; v < g.n; ++v) {
    double bound = kAlpha * (k.values[v] + logn) + slack;
    EXPECT_LE(hot[v], bound) << "vertex " << v << " degree " << g.degree(v);
  }
  // The unsampled run's hub cost is its full degree.
  PeelConfig off = cfg;
  off.sampling = false;
  std::vector<uint32_t> hot_off;
  off.hot_updates_out = &hot_off;
  auto [k2, s2] = decompose(g, off);
  degree_t dmax = g.max_degree();
  for (vertex_t v = 0; v < g.n; ++v)
    if (g.degree(v) == dmax)
      EXPECT_GE(hot_off[v] + k.values[v], static_cast<uint32_t>(dmax));
}

TEST(Stats, SubroundCountsAndSamples) {
  CsrGraph g = gen_ba(3000, 8, 5);
  PeelConfig with;
  with.sampling = true;
  with.threads = 2;
  auto [k1, s1] = decompose(g, with);
  EXPECT_TRUE(verify_coreness(g, k1).pass);
  EXPECT_GT(s1.samples, 0u) << "hubs should enter sample mode on this graph";
  EXPECT_EQ(s1.restarts, 0u);

  PeelConfig without = with;
  without.sampling = false;
  auto [k2, s2] = decompose(g, without);
  EXPECT_EQ(k1, k2);
  EXPECT_EQ(s2.samples, 0u);
  EXPECT_LE(s2.decrements, g.m2);
}
