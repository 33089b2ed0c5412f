#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kcore/defs.hpp"
#include "kcore/parallel.hpp"

namespace kcore {

// Raw edge pairs as ingested; may contain duplicates, self-loops and
// one-directional entries. from_edges() canonicalizes.
struct EdgeList {
  uint64_t n = 0;
  std::vector<std::pair<vertex_t, vertex_t>> edges;
};

// Immutable symmetric simple graph in compressed adjacency form.
// offsets has n+1 entries; targets holds m2 = sum of degrees slots.
// Adjacency lists are sorted ascending; no self-loops or duplicates.
struct CsrGraph {
  uint64_t n = 0;
  uint64_t m2 = 0;
  std::vector<uint64_t> offsets;
  std::vector<vertex_t> targets;

  degree_t degree(vertex_t v) const {
    return static_cast<degree_t>(offsets[v + 1] - offsets[v]);
  }
  std::span<const vertex_t> neighbors(vertex_t v) const {
    return {targets.data() + offsets[v], targets.data() + offsets[v + 1]};
  }
  degree_t max_degree() const {
    degree_t d = 0;
    for (vertex_t v = 0; v < n; ++v) d = std::max(d, degree(v));
    return d;
  }
  bool operator==(const CsrGraph& o) const = default;
};

// Structural validity: monotone offsets, in-range sorted simple adjacency,
// and symmetry. Used by tests and the binary loader (loader skips the
// quadratic-ish symmetry probe only when asked).
inline void check_invariants(const CsrGraph& g, bool check_symmetry = true) {
  if (g.offsets.size() != g.n + 1 || g.offsets[0] != 0 || g.offsets[g.n] != g.m2 ||
      g.targets.size() != g.m2)
    throw format_error("csr: offsets/slot counts inconsistent");
  for (vertex_t v = 0; v < g.n; ++v) {
    if (g.offsets[v] > g.offsets[v + 1]) throw format_error("csr: offsets not monotone");
    auto nbrs = g.neighbors(v);
    for (size_t i = 0; i < nbrs.size(); ++i) {
      if (nbrs[i] >= g.n) throw format_error("csr: target id out of range");
      if (nbrs[i] == v) throw format_error("csr: self loop");
      if (i > 0 && nbrs[i - 1] >= nbrs[i]) throw format_error("csr: adjacency not sorted/unique");
    }
  }
  if (check_symmetry) {
    for (vertex_t v = 0; v < g.n; ++v) {
      for (vertex_t u : g.neighbors(v)) {
        auto nu = g.neighbors(u);
        if (!std::binary_search(nu.begin(), nu.end(), v))
          throw format_error("csr: missing reverse edge");
      }
    }
  }
}

// Symmetrizes, drops self-loops, merges duplicates, sorts adjacency.
inline CsrGraph from_edges(const EdgeList& e, int threads = 1) {
  for (auto [u, v] : e.edges) {
    if (u >= e.n || v >= e.n) throw param_error("edge endpoint out of range");
  }
  size_t n = e.n;
  std::vector<uint64_t> count(n + 1, 0);
  for (auto [u, v] : e.edges) {
    if (u == v) continue;
    ++count[u + 1];
    ++count[v + 1];
  }
  for (size_t i = 0; i < n; ++i) count[i + 1] += count[i];
  std::vector<vertex_t> adj(count[n]);
  std::vector<uint64_t> fill(count.begin(), count.end() - 1);
  for (auto [u, v] : e.edges) {
    if (u == v) continue;
    adj[fill[u]++] = v;
    adj[fill[v]++] = u;
  }
  CsrGraph g;
  g.n = n;
  g.offsets.assign(n + 1, 0);
  parallel_for(n, threads, [&](size_t v) {
    auto begin = adj.begin() + static_cast<int64_t>(count[v]);
    auto end = adj.begin() + static_cast<int64_t>(count[v + 1]);
    std::sort(begin, end);
    auto last = std::unique(begin, end);
    g.offsets[v + 1] = static_cast<uint64_t>(last - begin);
  });
  for (size_t v = 0; v < n; ++v) g.offsets[v + 1] += g.offsets[v];
  g.m2 = g.offsets[n];
  g.targets.resize(g.m2);
  parallel_for(n, threads, [&](size_t v) {
    uint64_t len = g.offsets[v + 1] - g.offsets[v];
    std::copy_n(adj.begin() + static_cast<int64_t>(count[v]), len,
                g.targets.begin() + static_cast<int64_t>(g.offsets[v]));
  });
  return g;
}

// Text edge lists: two whitespace-separated ids per line; '#'/'%' lines are
// comments, except a leading "# <n>" header which pins the vertex count.
inline EdgeList load_edge_list(std::istream& in) {
  EdgeList e;
  bool n_fixed = false;
  uint64_t max_id = 0;
  bool any = false;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '#' || line[pos] == '%') {
      if (!n_fixed && e.edges.empty()) {
        std::istringstream hs(line.substr(pos + 1));
        uint64_t n;
        if (hs >> n) {
          std::string rest;
          if (!(hs >> rest)) {
            e.n = n;
            n_fixed = true;
          }
        }
      }
      continue;
    }
    std::istringstream ls(line);
    int64_t u, v;
    std::string trailing;
    if (!(ls >> u >> v) || u < 0 || v < 0)
      throw format_error("edge list parse error at line " + std::to_string(lineno));
    if (ls >> trailing)
      throw format_error("edge list parse error at line " + std::to_string(lineno));
    e.edges.emplace_back(static_cast<vertex_t>(u), static_cast<vertex_t>(v));
    max_id = std::max({max_id, static_cast<uint64_t>(u), static_cast<uint64_t>(v)});
    any = true;
  }
  if (!n_fixed) e.n = any ? max_id + 1 : 0;
  if (any && max_id >= e.n)
    throw format_error("edge id " + std::to_string(max_id) + " exceeds declared n");
  return e;
}

namespace detail {

inline uint64_t to_le(uint64_t x) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(x);
  return x;
}

inline void put_u64(std::ostream& out, uint64_t x) {
  x = to_le(x);
  out.write(reinterpret_cast<const char*>(&x), 8);
}

inline uint64_t get_u64(std::istream& in) {
  uint64_t x = 0;
  in.read(reinterpret_cast<char*>(&x), 8);
  if (!in) throw format_error("truncated stream");
  return to_le(x);
}

}  // namespace detail

// Binary format: "KCG1" | u64 n | u64 m2 | (n+1) x u64 offsets | m2 x u64
// targets, little-endian throughout.
inline void save_binary(const CsrGraph& g, std::ostream& out) {
  out.write("KCG1", 4);
  detail::put_u64(out, g.n);
  detail::put_u64(out, g.m2);
  for (uint64_t o : g.offsets) detail::put_u64(out, o);
  for (vertex_t t : g.targets) detail::put_u64(out, t);
  if (!out) throw format_error("write failed");
}

inline CsrGraph load_binary(std::istream& in, bool check_symmetry = false) {
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "KCG1", 4) != 0) throw format_error("bad magic, not a KCG1 file");
  CsrGraph g;
  g.n = detail::get_u64(in);
  g.m2 = detail::get_u64(in);
  g.offsets.resize(g.n + 1);
  for (uint64_t i = 0; i <= g.n; ++i) g.offsets[i] = detail::get_u64(in);
  g.targets.resize(g.m2);
  for (uint64_t i = 0; i < g.m2; ++i) {
    uint64_t t = detail::get_u64(in);
    if (t >= g.n) throw format_error("target id out of range");
    g.targets[i] = static_cast<vertex_t>(t);
  }
  check_invariants(g, check_symmetry);
  return g;
}

namespace detail {

inline void check_capacity(uint64_t n) {
  if (n >= kNoVertex) throw param_error("vertex count overflows id space");
}

}  // namespace detail

// w x h lattice, 4-neighbor, no wraparound.
inline CsrGraph gen_grid(uint64_t w, uint64_t h) {
  if (w < 1 || h < 1) throw param_error("grid dims must be >= 1");
  detail::check_capacity(w * h);
  EdgeList e;
  e.n = w * h;
  e.edges.reserve(2 * w * h);
  auto id = [w](uint64_t r, uint64_t c) { return static_cast<vertex_t>(r * w + c); };
  for (uint64_t r = 0; r < h; ++r)
    for (uint64_t c = 0; c < w; ++c) {
      if (c + 1 < w) e.edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < h) e.edges.emplace_back(id(r, c), id(r + 1, c));
    }
  return from_edges(e);
}

// x * y * z lattice, 6-neighbor.
inline CsrGraph gen_cube(uint64_t x, uint64_t y, uint64_t z) {
  if (x < 1 || y < 1 || z < 1) throw param_error("cube dims must be >= 1");
  detail::check_capacity(x * y * z);
  EdgeList e;
  e.n = x * y * z;
  e.edges.reserve(3 * e.n);
  auto id = [x, y](uint64_t i, uint64_t j, uint64_t k) {
    return static_cast<vertex_t>((k * y + j) * x + i);
  };
  for (uint64_t k = 0; k < z; ++k)
    for (uint64_t j = 0; j < y; ++j)
      for (uint64_t i = 0; i < x; ++i) {
        if (i + 1 < x) e.edges.emplace_back(id(i, j, k), id(i + 1, j, k));
        if (j + 1 < y) e.edges.emplace_back(id(i, j, k), id(i, j + 1, k));
        if (k + 1 < z) e.edges.emplace_back(id(i, j, k), id(i, j, k + 1));
      }
  return from_edges(e);
}

// High-coreness profile graph: a clique of size kmax+1 (ids 0..kmax) plus,
// for each i in 1..kmax-1, one pendant vertex joined to i distinct clique
// vertices. Gives exactly one vertex of coreness i for i < kmax and kmax+1
// vertices of coreness kmax.
inline CsrGraph gen_hcns(uint64_t kmax, uint64_t seed) {
  if (kmax < 1) throw param_error("hcns kmax must be >= 1");
  uint64_t clique = kmax + 1;
  uint64_t n = clique + (kmax - 1);
  detail::check_capacity(n);
  EdgeList e;
  e.n = n;
  for (uint64_t a = 0; a < clique; ++a)
    for (uint64_t b = a + 1; b < clique; ++b)
      e.edges.emplace_back(static_cast<vertex_t>(a), static_cast<vertex_t>(b));
  std::mt19937_64 rng(seed);
  std::vector<vertex_t> pool(clique);
  for (uint64_t a = 0; a < clique; ++a) pool[a] = static_cast<vertex_t>(a);
  for (uint64_t i = 1; i < kmax; ++i) {
    vertex_t pendant = static_cast<vertex_t>(clique + i - 1);
    std::shuffle(pool.begin(), pool.end(), rng);
    for (uint64_t j = 0; j < i; ++j) e.edges.emplace_back(pendant, pool[j]);
  }
  return from_edges(e);
}

// Preferential attachment: seed clique K_{a+1}, then each new vertex picks a
// distinct targets by repeated draws from the running endpoint list,
// rejecting duplicates. Deterministic under (n, a, seed).
inline CsrGraph gen_ba(uint64_t n, uint64_t a, uint64_t seed) {
  if (a < 1) throw param_error("ba attach degree must be >= 1");
  if (n < a + 1) throw param_error("ba needs n >= a+1");
  detail::check_capacity(n);
  EdgeList e;
  e.n = n;
  uint64_t edge_count = a * (a + 1) / 2 + a * (n - a - 1);
  e.edges.reserve(edge_count);
  std::vector<vertex_t> endpoints;
  endpoints.reserve(2 * edge_count);
  auto add_edge = [&](vertex_t u, vertex_t v) {
    e.edges.emplace_back(u, v);
    endpoints.push_back(u);
    endpoints.push_back(v);
  };
  for (uint64_t u = 0; u <= a; ++u)
    for (uint64_t v = u + 1; v <= a; ++v)
      add_edge(static_cast<vertex_t>(u), static_cast<vertex_t>(v));
  std::mt19937_64 rng(seed);
  std::vector<vertex_t> chosen;
  for (uint64_t t = a + 1; t < n; ++t) {
    chosen.clear();
    while (chosen.size() < a) {
      vertex_t cand = endpoints[rng() % endpoints.size()];
      if (std::find(chosen.begin(), chosen.end(), cand) == chosen.end())
        chosen.push_back(cand);
    }
    for (vertex_t c : chosen) add_edge(static_cast<vertex_t>(t), c);
  }
  return from_edges(e);
}

}  // namespace kcore
