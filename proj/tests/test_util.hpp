#pragma once

#include <algorithm>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

#include "kcore/bz.hpp"
#include "kcore/engine.hpp"
#include "kcore/graph.hpp"

namespace kcore::testutil {

inline CsrGraph make_graph(uint64_t n,
                           std::initializer_list<std::pair<vertex_t, vertex_t>> edges) {
  EdgeList e;
  e.n = n;
  e.edges.assign(edges.begin(), edges.end());
  return from_edges(e);
}

inline CsrGraph path(vertex_t n) {
  EdgeList e;
  e.n = n;
  for (vertex_t i = 0; i + 1 < n; ++i) e.edges.emplace_back(i, i + 1);
  return from_edges(e);
}

// Center 0 with `leaves` pendant vertices.
inline CsrGraph star(vertex_t leaves) {
  EdgeList e;
  e.n = leaves + 1;
  for (vertex_t i = 1; i <= leaves; ++i) e.edges.emplace_back(0, i);
  return from_edges(e);
}

inline CsrGraph clique(vertex_t n) {
  EdgeList e;
  e.n = n;
  for (vertex_t u = 0; u < n; ++u)
    for (vertex_t v = u + 1; v < n; ++v) e.edges.emplace_back(u, v);
  return from_edges(e);
}

inline CsrGraph er_graph(vertex_t n, double avg_degree, uint64_t seed) {
  EdgeList e;
  e.n = n;
  double p = n > 1 ? std::min(1.0, avg_degree / static_cast<double>(n - 1)) : 0.0;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution flip(p);
  for (vertex_t u = 0; u < n; ++u)
    for (vertex_t v = u + 1; v < n; ++v)
      if (flip(rng)) e.edges.emplace_back(u, v);
  return from_edges(e);
}

// Every legal point of the config matrix: peel x sampling x vgc x bucketing.
inline std::vector<PeelConfig> legal_configs(uint64_t seed = 1) {
  std::vector<PeelConfig> out;
  std::vector<BucketStrategy> buckets;
  buckets.push_back({BucketKind::single, 16, 16});
  buckets.push_back({BucketKind::fixed, 16, 16});
  buckets.push_back({BucketKind::hbs, 16, 16});
  buckets.push_back({BucketKind::autoswitch, 16, 16});
  for (const auto& b : buckets) {
    PeelConfig off;
    off.peel = PeelMode::offline;
    off.sampling = false;
    off.vgc = 0;
    off.bucketing = b;
    off.seed = seed;
    out.push_back(off);
    for (int vgc : {0, 128}) {
      for (bool sampling : {false, true}) {
        PeelConfig on;
        on.peel = PeelMode::online;
        on.sampling = sampling;
        on.vgc = vgc;
        on.bucketing = b;
        on.seed = seed;
        out.push_back(on);
      }
    }
  }
  return out;
}

inline std::vector<degree_t> degrees_of(const CsrGraph& g) {
  std::vector<degree_t> d(g.n);
  for (vertex_t v = 0; v < g.n; ++v) d[v] = g.degree(v);
  return d;
}

}  // namespace kcore::testutil
