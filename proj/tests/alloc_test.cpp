// Copyright 2026 The mtesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <array>
#include <map>
#include <random>

#include "mtesim/alloc.hpp"

namespace mtesim {
namespace {

constexpr Addr kHeap = 0x200000;
constexpr BulkTagStrategy kAll[] = {BulkTagStrategy::kNaiveStg, BulkTagStrategy::kNaiveSt2g,
                                    BulkTagStrategy::kLinewiseDcGva, BulkTagStrategy::kMixedWidth};

// Reference: tags every granule of the range on its own.
std::map<Addr, unsigned> enumerate_granules(Addr addr, std::uint64_t len, unsigned tag) {
  std::map<Addr, unsigned> out;
  for (Addr g = addr; g < addr + len; g += 16) out[g] = tag;
  return out;
}

// Fewest ops when whole lines take one op and everything else pairs up.
std::size_t min_ops(Addr addr, std::uint64_t len) {
  const Addr first_line = align_up(addr, 64);
  const Addr last_line = align_down(addr + len, 64);
  if (first_line >= last_line) return (len / 16 + 1) / 2;
  const std::uint64_t head = (first_line - addr) / 16;
  const std::uint64_t tail = (addr + len - last_line) / 16;
  return (head + 1) / 2 + (last_line - first_line) / 64 + (tail + 1) / 2;
}

std::vector<Op> ops_of(const std::vector<Instruction>& v) {
  std::vector<Op> out;
  for (const Instruction& i : v) out.push_back(i.op);
  return out;
}

TEST(Alloc, BulkTagExamples) {
  EXPECT_EQ(bulk_tag(0x1000, 64, Tag(1), BulkTagStrategy::kLinewiseDcGva).size(), 1u);
  EXPECT_EQ(bulk_tag(0x1000, 64, Tag(1), BulkTagStrategy::kNaiveStg).size(), 4u);
  EXPECT_EQ(ops_of(bulk_tag(0x1000, 48, Tag(1), BulkTagStrategy::kMixedWidth)),
            (std::vector<Op>{Op::kSt2g, Op::kStg}));
  EXPECT_EQ(ops_of(bulk_tag(0x1030, 64, Tag(1), BulkTagStrategy::kMixedWidth)),
            (std::vector<Op>{Op::kSt2g, Op::kSt2g}));
  EXPECT_THROW(bulk_tag(0x1030, 64, Tag(1), BulkTagStrategy::kLinewiseDcGva), SimError);
  EXPECT_THROW(bulk_tag(0x1008, 32, Tag(1), BulkTagStrategy::kNaiveStg), SimError);
  EXPECT_THROW(bulk_tag(0x1000, 24, Tag(1), BulkTagStrategy::kMixedWidth), SimError);
  EXPECT_TRUE(bulk_tag(0x1000, 0, Tag(1), BulkTagStrategy::kMixedWidth).empty());
}

TEST(AllocProperty, StrategiesAgreeWithGranuleEnumeration) {
  std::mt19937_64 rng(41);
  for (int n = 0; n < 10000; ++n) {
    const Addr addr = kHeap + 64 + (rng() % 256) * 16;
    const std::uint64_t len = (rng() % 64) * 16;
    const unsigned tag = 1 + rng() % 15;
    const std::map<Addr, unsigned> want = enumerate_granules(addr, len, tag);

    std::size_t counts[4] = {};
    for (std::size_t s = 0; s < 4; ++s) {
      const bool line_ok = is_aligned(addr, 64) && len % 64 == 0;
      if (kAll[s] == BulkTagStrategy::kLinewiseDcGva && !line_ok) {
        EXPECT_THROW(bulk_tag(addr, len, Tag(tag), kAll[s]), SimError);
        continue;
      }
      TaggedMemory m;
      m.map(kHeap, 3 * kPageBytes, PageAttrs{true, false});
      const std::vector<Instruction> ops = bulk_tag(addr, len, Tag(tag), kAll[s]);
      counts[s] = ops.size();
      for (const Instruction& i : ops) exec_tag_op(i, m);
      for (Addr g = kHeap; g < kHeap + 3 * kPageBytes; g += 16) {
        const auto it = want.find(g);
        ASSERT_EQ(m.get_tag(Granule{g}).value(), it == want.end() ? 0u : it->second)
            << to_string(kAll[s]) << " addr " << addr << " len " << len;
      }
    }
    EXPECT_EQ(counts[0], len / 16);
    EXPECT_EQ(counts[1], (len + 31) / 32);
    EXPECT_EQ(counts[3], min_ops(addr, len));
    EXPECT_LE(counts[3], counts[1]);
    EXPECT_LE(counts[1], counts[0]);
  }
}

TEST(Alloc, MallocRoundsAndTags) {
  TaggedMemory m;
  TaggedHeap heap(m, kHeap, 1 << 20, AllocPolicy{});
  const TaggedAddress p = heap.malloc(17);
  EXPECT_TRUE(is_aligned(p.untagged(), 16));
  EXPECT_NE(p.tag().value(), 0u);
  EXPECT_EQ(m.get_tag(Granule{p.untagged()}), p.tag());
  EXPECT_EQ(m.get_tag(Granule{p.untagged() + 16}), p.tag());
  EXPECT_EQ(heap.malloc(16).untagged(), p.untagged() + 32);
  EXPECT_THROW(heap.malloc(0), SimError);
  EXPECT_THROW(heap.free(make_tagged(kHeap + 0x800, Tag(0))), SimError);
}

TEST(Alloc, SelectiveThreshold) {
  TaggedMemory m;
  AllocPolicy policy;
  policy.selective_threshold = kDefaultSelectiveThreshold;
  TaggedHeap heap(m, kHeap, 1 << 20, policy);
  const TaggedAddress big = heap.malloc(40960);
  EXPECT_EQ(big.tag().value(), 0u);
  EXPECT_EQ(heap.tag_op_count(), 0u);
  const TaggedAddress small = heap.malloc(32768);
  EXPECT_NE(small.tag().value(), 0u);
  EXPECT_GT(heap.tag_op_count(), 0u);
}

TEST(Alloc, OutOfSimMemory) {
  TaggedMemory m;
  TaggedHeap heap(m, kHeap, 4096, AllocPolicy{});
  heap.malloc(4000);
  try {
    heap.malloc(200);
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kOutOfSimMemory);
  }
}

TEST(AllocProperty, TagDistributionIsUniformOverNonZeroTags) {
  TaggedMemory m;
  TaggedHeap heap(m, kHeap, 2u << 20, AllocPolicy{});
  constexpr int kN = 100000;
  std::array<int, 16> seen{};
  for (int i = 0; i < kN; ++i) ++seen[heap.malloc(16).tag().value()];
  EXPECT_EQ(seen[0], 0);
  double chi2 = 0;
  for (unsigned t = 1; t < 16; ++t) {
    const double f = double(seen[t]) / kN;
    EXPECT_NEAR(f, 1.0 / 15, 0.01) << "tag " << t;
    const double e = kN / 15.0;
    chi2 += (seen[t] - e) * (seen[t] - e) / e;
  }
  EXPECT_LT(chi2, 36.12);  // 14 degrees of freedom, p = 0.001
}

TEST(AllocProperty, StaleAccessDetectionRate) {
  TaggedMemory m;
  TaggedHeap heap(m, kHeap, 1 << 20, AllocPolicy{});
  constexpr int kTrials = 100000;
  int faults = 0;
  for (int i = 0; i < kTrials; ++i) {
    const TaggedAddress stale = heap.malloc(48);
    heap.free(stale);
    const TaggedAddress fresh = heap.malloc(48);
    ASSERT_EQ(fresh.untagged(), stale.untagged());
    if (tag_check(stale, m, CheckConfig{}, MteMode::kSync, false).outcome == CheckOutcome::kFail) ++faults;
    heap.free(fresh);
  }
  EXPECT_NEAR(double(faults) / kTrials, 15.0 / 16.0, 0.01);
}

TEST(Alloc, ExcludePreviousTagAlwaysDetectsReuse) {
  TaggedMemory m;
  AllocPolicy policy;
  policy.exclude_previous_tag = true;
  TaggedHeap heap(m, kHeap, 1 << 20, policy);
  for (int i = 0; i < 2000; ++i) {
    const TaggedAddress a = heap.malloc(64);
    heap.free(a);
    const TaggedAddress b = heap.malloc(64);
    EXPECT_NE(a.tag(), b.tag());
    heap.free(b);
  }
}

TEST(Alloc, StickyReuseOnlyPaysFirstEpoch) {
  TaggedMemory m;
  AllocPolicy policy;
  policy.sticky_reuse = true;
  TaggedHeap heap(m, kHeap, 1 << 20, policy);
  std::vector<TaggedAddress> first;
  for (std::uint64_t s : {16, 48, 256, 1024, 4096}) first.push_back(heap.malloc(s));
  const std::uint64_t epoch = heap.tag_op_count();
  for (const TaggedAddress& p : first) heap.free(p);
  std::vector<TaggedAddress> second;
  for (std::uint64_t s : {16, 48, 256, 1024, 4096}) second.push_back(heap.malloc(s));
  EXPECT_EQ(heap.tag_op_count(), epoch);
  for (std::size_t i = 0; i < first.size(); ++i) EXPECT_EQ(first[i], second[i]);

  // Without stickiness both free and malloc retag.
  TaggedMemory m2;
  TaggedHeap plain(m2, kHeap, 1 << 20, AllocPolicy{});
  const TaggedAddress p = plain.malloc(256);
  const std::uint64_t once = plain.tag_op_count();
  plain.free(p);
  plain.malloc(256);
  EXPECT_EQ(plain.tag_op_count(), 3 * once);
}

TEST(Alloc, EmittedOpsReplayToSameTags) {
  TaggedMemory m;
  TaggedHeap heap(m, kHeap, 1 << 20, AllocPolicy{});
  std::mt19937_64 rng(45);
  std::vector<TaggedAddress> live;
  for (int i = 0; i < 500; ++i) {
    if (!live.empty() && rng() % 3 == 0) {
      const std::size_t k = rng() % live.size();
      heap.free(live[k]);
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
      live.push_back(heap.malloc(1 + rng() % 300));
    }
  }
  TaggedMemory replay;
  replay.map(kHeap, 1 << 20, PageAttrs{true, false});
  for (const Instruction& in : heap.tag_ops()) exec_tag_op(in, replay);
  EXPECT_EQ(replay.snapshot(), m.snapshot());
  for (const TaggedAddress& p : live) EXPECT_EQ(m.get_tag(Granule{p.untagged()}), p.tag());
}

TEST(Alloc, TraceParsing) {
  const std::vector<AllocEvent> ev = parse_alloc_trace("# warm\nmalloc 64\nmalloc 10\nfree 0\n\n");
  ASSERT_EQ(ev.size(), 3u);
  EXPECT_TRUE(ev[0].is_malloc);
  EXPECT_EQ(ev[1].value, 10u);
  EXPECT_FALSE(ev[2].is_malloc);
  EXPECT_THROW(parse_alloc_trace("realloc 3\n"), SimError);
  EXPECT_THROW(parse_alloc_trace("malloc x\n"), SimError);
  EXPECT_THROW(parse_alloc_trace("malloc 3 4\n"), SimError);
}

}  // namespace
}  // namespace mtesim
