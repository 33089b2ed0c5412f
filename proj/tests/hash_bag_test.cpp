#include <gtest/gtest.h>
#include <omp.h>

#include <algorithm>
#include <vector>

#include "kcore/hash_bag.hpp"

using namespace kcore;

namespace {
std::vector<vertex_t> sorted(std::vector<vertex_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}
}  // namespace

TEST(HashBag, InsertExtractMultiset) {
  HashBag bag(100);
  bag.insert(5);
  bag.insert(7);
  bag.insert(3);
  EXPECT_EQ(sorted(bag.extract_all()), (std::vector<vertex_t>{3, 5, 7}));
}

TEST(HashBag, DuplicatesAreDistinctEntries) {
  HashBag bag(100);
  bag.insert(5);
  bag.insert(7);
  bag.insert(5);
  EXPECT_EQ(sorted(bag.extract_all()), (std::vector<vertex_t>{5, 5, 7}));
}

TEST(HashBag, ChunkAdvancesPastLoadThreshold) {
  // 200 inserts exceed the first chunk's threshold of 128, so the active
  // chunk moves to 1.
  HashBag bag(1000);
  for (vertex_t i = 0; i < 200; ++i) bag.insert(i);
  EXPECT_EQ(bag.active_chunk(), 1);
  EXPECT_EQ(bag.extract_all().size(), 200u);
}

TEST(HashBag, StaysInFirstChunkBelowThreshold) {
  HashBag bag(1000);
  for (vertex_t i = 0; i < 128; ++i) bag.insert(i);
  EXPECT_EQ(bag.active_chunk(), 0);
}

TEST(HashBag, ExtractResets) {
  HashBag bag(100);
  bag.insert(1);
  bag.insert(2);
  EXPECT_EQ(bag.extract_all().size(), 2u);
  EXPECT_TRUE(bag.extract_all().empty());
  EXPECT_TRUE(bag.empty());
}

TEST(HashBag, EmptyExtractScansOnlyFirstChunk) {
  HashBag bag(100000);
  EXPECT_TRUE(bag.extract_all().empty());
  EXPECT_EQ(bag.last_scanned_slots(), static_cast<size_t>(HashBag::kLambda));
}

// Extraction cost is proportional to the used prefix: scanned slots are
// exactly lambda * (2^(a+1) - 1) for active chunk a.
TEST(HashBag, ScanCostTracksActiveChunk) {
  HashBag bag(100000);
  for (vertex_t i = 0; i < 1000; ++i) bag.insert(i);
  int a = bag.active_chunk();
  size_t t = bag.extract_all().size();
  EXPECT_EQ(t, 1000u);
  EXPECT_EQ(bag.last_scanned_slots(),
            (static_cast<size_t>(HashBag::kLambda) << (a + 1)) - HashBag::kLambda);
  EXPECT_LT(bag.last_scanned_slots(), 8 * t + 2 * HashBag::kLambda);
}

TEST(HashBag, OverflowThrows) {
  HashBag bag(10);
  EXPECT_THROW(
      {
        for (vertex_t i = 0; i < 100000; ++i) bag.insert(i);
      },
      bag_overflow);
}

// Linearizable multiset semantics under concurrent inserts: unique payloads
// from all threads come back exactly once.
TEST(HashBag, ConcurrentInsertsExact) {
  constexpr int kThreads = 8;
  constexpr vertex_t kPerThread = 20000;
  for (uint64_t seed = 0; seed < 5; ++seed) {
    HashBag bag(kThreads * kPerThread, seed);
#pragma omp parallel num_threads(kThreads)
    {
      vertex_t base = static_cast<vertex_t>(omp_get_thread_num()) * kPerThread;
      for (vertex_t i = 0; i < kPerThread; ++i) bag.insert(base + i);
    }
    auto got = sorted(bag.extract_all(4));
    ASSERT_EQ(got.size(), static_cast<size_t>(kThreads) * kPerThread);
    for (size_t i = 0; i < got.size(); ++i)
      ASSERT_EQ(got[i], static_cast<vertex_t>(i)) << "seed " << seed;
  }
}

// Concurrent duplicate payloads all count.
TEST(HashBag, ConcurrentDuplicatesKept) {
  HashBag bag(8 * 1000);
#pragma omp parallel num_threads(8)
  {
    for (int i = 0; i < 1000; ++i) bag.insert(42);
  }
  auto got = bag.extract_all();
  EXPECT_EQ(got.size(), 8000u);
  for (vertex_t v : got) EXPECT_EQ(v, 42u);
}
