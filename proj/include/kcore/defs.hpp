#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace kcore {

using vertex_t = uint32_t;

// Induced degrees and coreness values are kept signed so that arithmetic
// around the current round k never wraps.
using degree_t = int32_t;

inline constexpr degree_t kNotPeeled = -1;
inline constexpr vertex_t kNoVertex = std::numeric_limits<vertex_t>::max();

// Malformed or inconsistent on-disk data (bad magic, truncated stream,
// broken offsets). CLI exit code 2.
struct format_error : std::runtime_error {
  explicit format_error(const std::string& what) : std::runtime_error(what) {}
};

// Bad user-supplied parameters or illegal configuration combos.
// CLI exit code 3.
struct param_error : std::runtime_error {
  explicit param_error(const std::string& what) : std::runtime_error(what) {}
};

// Caller sizing bug: more live elements than a bag was built for.
struct bag_overflow : std::runtime_error {
  explicit bag_overflow(const std::string& what) : std::runtime_error(what) {}
};

// 64-bit finalizer (splitmix64). Used for hash bag probing and the
// per-edge sampling coins; must stay fixed so seeded runs are reproducible.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t mix64(uint64_t a, uint64_t b) { return mix64(a ^ (b * 0xff51afd7ed558ccdULL)); }

}  // namespace kcore
