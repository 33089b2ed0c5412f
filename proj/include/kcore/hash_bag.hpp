#pragma once

#include <atomic>
#include <cassert>
#include <cstdint>
#include <memory>
#include <vector>

#include "kcore/defs.hpp"
#include "kcore/parallel.hpp"

namespace kcore {

// Concurrent multiset of vertex ids with a chunked geometric layout.
// Chunks have sizes lambda, 2*lambda, 4*lambda, ...; inserts hash into the
// active chunk with linear probing, and once a chunk's occupancy counter
// crosses half its size, later inserts move on to the next chunk. Extraction
// only scans the chunk prefix that was actually used, so its cost is
// O(lambda + t) for t stored elements.
//
// bag_insert is safe from any number of threads; extract_all requires that
// no inserts run concurrently (the engine alternates insert and extract
// phases at subround boundaries).
class HashBag {
 public:
  static constexpr uint32_t kLambda = 256;  // smallest chunk size
  static constexpr vertex_t kEmpty = kNoVertex;

  explicit HashBag(size_t capacity, uint64_t seed = 0x5eed) : seed_(seed) {
    // Chunk i admits chunk_size/2 reservations before closing, so the first
    // K chunks admit lambda*(2^K - 1)/2 elements. One spare chunk absorbs
    // concurrent over-advance.
    num_chunks_ = 1;
    while ((static_cast<size_t>(kLambda) << num_chunks_) - kLambda < 2 * capacity)
      ++num_chunks_;
    ++num_chunks_;
    total_slots_ = (static_cast<size_t>(kLambda) << num_chunks_) - kLambda;
    slots_ = std::make_unique<std::atomic<vertex_t>[]>(total_slots_);
    for (size_t i = 0; i < total_slots_; ++i)
      slots_[i].store(kEmpty, std::memory_order_relaxed);
    occupancy_ = std::make_unique<std::atomic<uint32_t>[]>(static_cast<size_t>(num_chunks_));
    for (int i = 0; i < num_chunks_; ++i)
      occupancy_[static_cast<size_t>(i)].store(0, std::memory_order_relaxed);
    active_chunk_.store(0, std::memory_order_relaxed);
  }

  void insert(vertex_t x) {
    int c = active_chunk_.load(std::memory_order_relaxed);
    for (;;) {
      if (c >= num_chunks_) throw bag_overflow("hash bag capacity exhausted");
      uint32_t size = kLambda << c;
      uint32_t occ =
          occupancy_[static_cast<size_t>(c)].fetch_add(1, std::memory_order_relaxed) + 1;
      if (occ > size / 2) {
        int expect = c;
        active_chunk_.compare_exchange_strong(expect, c + 1, std::memory_order_relaxed);
        ++c;
        continue;
      }
      if (probe_insert(c, x)) return;
      // Chunk physically full despite the counter (counter drift); spill on.
      ++c;
    }
  }

  // Removes and returns the stored multiset. Exclusive access required.
  std::vector<vertex_t> extract_all(int threads = 1) {
    int a = active_chunk_.load(std::memory_order_relaxed);
    if (a >= num_chunks_) a = num_chunks_ - 1;
    size_t prefix = (static_cast<size_t>(kLambda) << (a + 1)) - kLambda;
    last_scanned_ = prefix;
    std::vector<vertex_t> out;
    if (threads > 1 && prefix >= 8192) {
      std::vector<vertex_t> raw(prefix);
      parallel_for(prefix, threads, [&](size_t i) {
        raw[i] = slots_[i].exchange(kEmpty, std::memory_order_relaxed);
      });
      out = pack(raw, threads, [](vertex_t v) { return v != kEmpty; });
    } else {
      for (size_t i = 0; i < prefix; ++i) {
        vertex_t v = slots_[i].load(std::memory_order_relaxed);
        if (v != kEmpty) {
          out.push_back(v);
          slots_[i].store(kEmpty, std::memory_order_relaxed);
        }
      }
    }
    for (int ci = 0; ci <= a; ++ci)
      occupancy_[static_cast<size_t>(ci)].store(0, std::memory_order_relaxed);
    active_chunk_.store(0, std::memory_order_relaxed);
    return out;
  }

  bool empty() const {
    return active_chunk_.load(std::memory_order_relaxed) == 0 &&
           occupancy_[0].load(std::memory_order_relaxed) == 0;
  }

  int active_chunk() const { return active_chunk_.load(std::memory_order_relaxed); }
  size_t last_scanned_slots() const { return last_scanned_; }
  int num_chunks() const { return num_chunks_; }

 private:
  bool probe_insert(int c, vertex_t x) {
    uint32_t size = kLambda << c;
    size_t base = (static_cast<size_t>(kLambda) << c) - kLambda;
    uint32_t h = static_cast<uint32_t>(mix64(seed_, (static_cast<uint64_t>(c) << 32) | x)) &
                 (size - 1);
    for (uint32_t step = 0; step < size; ++step) {
      std::atomic<vertex_t>& slot = slots_[base + ((h + step) & (size - 1))];
      vertex_t cur = slot.load(std::memory_order_relaxed);
      if (cur == kEmpty &&
          slot.compare_exchange_strong(cur, x, std::memory_order_relaxed)) {
        return true;
      }
    }
    return false;
  }

  uint64_t seed_;
  int num_chunks_ = 0;
  size_t total_slots_ = 0;
  size_t last_scanned_ = 0;
  std::unique_ptr<std::atomic<vertex_t>[]> slots_;
  std::unique_ptr<std::atomic<uint32_t>[]> occupancy_;
  std::atomic<int> active_chunk_{0};
};

}  // namespace kcore
