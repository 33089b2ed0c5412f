#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <vector>

#include "kcore/defs.hpp"
#include "kcore/graph.hpp"

namespace kcore {

struct CorenessArray {
  std::vector<degree_t> values;

  degree_t kmax() const {
    degree_t k = 0;
    for (degree_t v : values) k = std::max(k, v);
    return k;
  }
  bool operator==(const CorenessArray& o) const = default;
};

// Sequential O(n+m) peeling in the Batagelj-Zaversnik / Matula-Beck style:
// vertices bucket-sorted by degree, minimum repeatedly removed with
// position-swap deletion. Kept strictly single-threaded and independent of
// the parallel engine so equivalence tests compare two genuine code paths.
inline CorenessArray bz_coreness(const CsrGraph& g) {
  size_t n = g.n;
  CorenessArray out;
  out.values.assign(n, 0);
  if (n == 0) return out;
  std::vector<degree_t> deg(n);
  degree_t dmax = 0;
  for (vertex_t v = 0; v < n; ++v) {
    deg[v] = g.degree(v);
    dmax = std::max(dmax, deg[v]);
  }
  std::vector<size_t> bin(static_cast<size_t>(dmax) + 2, 0);
  for (vertex_t v = 0; v < n; ++v) ++bin[static_cast<size_t>(deg[v]) + 1];
  for (size_t d = 0; d + 1 < bin.size(); ++d) bin[d + 1] += bin[d];
  std::vector<vertex_t> order(n);
  std::vector<size_t> pos(n);
  {
    std::vector<size_t> next(bin.begin(), bin.end() - 1);
    for (vertex_t v = 0; v < n; ++v) {
      pos[v] = next[static_cast<size_t>(deg[v])]++;
      order[pos[v]] = v;
    }
  }
  for (size_t i = 0; i < n; ++i) {
    vertex_t v = order[i];
    out.values[v] = deg[v];
    for (vertex_t u : g.neighbors(v)) {
      if (deg[u] > deg[v]) {
        // Swap u to the front of its degree bucket, then shrink one bucket.
        size_t du = static_cast<size_t>(deg[u]);
        size_t pu = pos[u];
        size_t pw = bin[du];
        vertex_t w = order[pw];
        if (u != w) {
          pos[u] = pw;
          pos[w] = pu;
          order[pu] = w;
          order[pw] = u;
        }
        ++bin[du];
        --deg[u];
      }
    }
  }
  return out;
}

struct VerifyResult {
  bool pass = true;
  vertex_t first_mismatch = kNoVertex;
  degree_t expected = 0;
  degree_t got = 0;
};

// Full recompute and elementwise compare; local witnesses alone are
// necessary but not sufficient.
inline VerifyResult verify_coreness(const CsrGraph& g, const CorenessArray& k) {
  if (k.values.size() != g.n) throw param_error("coreness length mismatch");
  CorenessArray truth = bz_coreness(g);
  for (vertex_t v = 0; v < g.n; ++v) {
    if (truth.values[v] != k.values[v])
      return {false, v, truth.values[v], k.values[v]};
  }
  return {};
}

// Binary format: "KCC1" | u64 n | n x u64 values, little-endian.
inline void save_coreness(const CorenessArray& k, std::ostream& out) {
  out.write("KCC1", 4);
  detail::put_u64(out, k.values.size());
  for (degree_t v : k.values) detail::put_u64(out, static_cast<uint64_t>(v));
  if (!out) throw format_error("write failed");
}

inline CorenessArray load_coreness(std::istream& in) {
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "KCC1", 4) != 0) throw format_error("bad magic, not a KCC1 file");
  uint64_t n = detail::get_u64(in);
  CorenessArray k;
  k.values.resize(n);
  for (uint64_t i = 0; i < n; ++i) k.values[i] = static_cast<degree_t>(detail::get_u64(in));
  return k;
}

}  // namespace kcore
