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

#include "mtesim/alloc.hpp"

#include <charconv>
#include <sstream>

namespace mtesim {

std::string_view to_string(BulkTagStrategy s) {
  switch (s) {
    case BulkTagStrategy::kNaiveStg: return "naive_stg";
    case BulkTagStrategy::kNaiveSt2g: return "naive_st2g";
    case BulkTagStrategy::kLinewiseDcGva: return "linewise_dcgva";
    case BulkTagStrategy::kMixedWidth: return "mixed_width";
  }
  return "?";
}

BulkTagStrategy parse_bulk_strategy(std::string_view s) {
  if (s == "naive_stg") return BulkTagStrategy::kNaiveStg;
  if (s == "naive_st2g") return BulkTagStrategy::kNaiveSt2g;
  if (s == "linewise_dcgva") return BulkTagStrategy::kLinewiseDcGva;
  if (s == "mixed_width") return BulkTagStrategy::kMixedWidth;
  throw SimError(ErrorKind::kParse, "unknown bulk-tag strategy '" + std::string(s) + "'");
}

namespace {

[[noreturn]] void unaligned(Addr addr, std::uint64_t len, Addr to) {
  std::ostringstream os;
  os << "range 0x" << std::hex << addr << "+0x" << len << " is not " << std::dec << to << "-byte aligned";
  throw SimError(ErrorKind::kUnalignedGranule, os.str());
}

std::vector<Instruction> mixed_width(Addr addr, std::uint64_t len, Tag tag) {
  const std::size_t n = len / kGranuleBytes;
  // best[k]: fewest ops tagging granules [k, n); how[k]: granules in the op at k.
  std::vector<std::uint32_t> best(n + 1, ~0u);
  std::vector<std::uint8_t> how(n + 1, 0);
  best[n] = 0;
  for (std::size_t k = n; k-- > 0;) {
    // Preference on ties: widest op first.
    for (std::uint8_t w : {std::uint8_t{4}, std::uint8_t{2}, std::uint8_t{1}}) {
      if (k + w > n) continue;
      if (w == 4 && !is_aligned(addr + k * kGranuleBytes, kLineBytes)) continue;
      if (best[k + w] + 1 < best[k]) {
        best[k] = best[k + w] + 1;
        how[k] = w;
      }
    }
  }
  std::vector<Instruction> out;
  out.reserve(best[0]);
  for (std::size_t k = 0; k < n; k += how[k]) {
    const std::uint8_t w = how[k];
    const Op op = w == 4 ? Op::kDcGva : w == 2 ? Op::kSt2g : Op::kStg;
    out.push_back(make_tag_op(op, make_tagged(addr + k * kGranuleBytes, tag)));
  }
  return out;
}

}  // namespace

std::vector<Instruction> bulk_tag(Addr addr, std::uint64_t len, Tag tag, BulkTagStrategy strategy) {
  if (!is_aligned(addr, kGranuleBytes) || len % kGranuleBytes != 0) unaligned(addr, len, kGranuleBytes);
  std::vector<Instruction> out;
  switch (strategy) {
    case BulkTagStrategy::kNaiveStg:
      for (Addr a = addr; a < addr + len; a += kGranuleBytes)
        out.push_back(make_tag_op(Op::kStg, make_tagged(a, tag)));
      break;
    case BulkTagStrategy::kNaiveSt2g: {
      Addr a = addr;
      for (; a + 2 * kGranuleBytes <= addr + len; a += 2 * kGranuleBytes)
        out.push_back(make_tag_op(Op::kSt2g, make_tagged(a, tag)));
      if (a < addr + len) out.push_back(make_tag_op(Op::kStg, make_tagged(a, tag)));
      break;
    }
    case BulkTagStrategy::kLinewiseDcGva:
      if (!is_aligned(addr, kLineBytes) || len % kLineBytes != 0) unaligned(addr, len, kLineBytes);
      for (Addr a = addr; a < addr + len; a += kLineBytes)
        out.push_back(make_tag_op(Op::kDcGva, make_tagged(a, tag)));
      break;
    case BulkTagStrategy::kMixedWidth: out = mixed_width(addr, len, tag); break;
  }
  return out;
}

TaggedHeap::TaggedHeap(TaggedMemory& mem, Addr base, std::uint64_t capacity, AllocPolicy policy,
                       BulkTagStrategy strategy)
    : mem_(mem),
      base_(align_up(base, kLineBytes)),
      end_(base + capacity),
      bump_(base_),
      policy_(policy),
      strategy_(strategy),
      rng_(policy.tag_rng_seed) {
  mem_.map(base, capacity, PageAttrs{true, false});
}

Tag TaggedHeap::draw_tag(std::optional<Tag> exclude) {
  if (exclude && !exclude->untagged()) {
    std::uniform_int_distribution<unsigned> dist(1, 14);
    const unsigned v = dist(rng_);
    return Tag(v >= exclude->value() ? v + 1 : v);
  }
  std::uniform_int_distribution<unsigned> dist(1, 15);
  return Tag(dist(rng_));
}

void TaggedHeap::retag(Addr addr, std::uint64_t len, Tag tag) {
  // Whole-line ops would spill onto neighbours unless the block owns the line.
  const BulkTagStrategy s =
      strategy_ == BulkTagStrategy::kLinewiseDcGva && (!is_aligned(addr, kLineBytes) || len % kLineBytes != 0)
          ? BulkTagStrategy::kMixedWidth
          : strategy_;
  for (Instruction& in : bulk_tag(addr, len, tag, s)) {
    exec_tag_op(in, mem_);
    ops_.push_back(in);
    ++op_count_;
  }
}

TaggedAddress TaggedHeap::malloc(std::uint64_t size) {
  if (size == 0) throw SimError(ErrorKind::kInvalidArgument, "malloc of zero bytes");
  const std::uint64_t rounded = align_up(size, kGranuleBytes);
  const bool tagged = !policy_.selective_threshold || size <= *policy_.selective_threshold;

  Addr addr = 0;
  bool reused = false;
  if (auto it = free_lists_.find(rounded); it != free_lists_.end() && !it->second.empty()) {
    addr = it->second.back();
    it->second.pop_back();
    reused = true;
  } else {
    if (rounded > end_ - bump_) {
      throw SimError(ErrorKind::kOutOfSimMemory, "heap exhausted allocating " + std::to_string(size) + " bytes");
    }
    addr = bump_;
    bump_ += rounded;
  }

  Block& b = blocks_[addr];
  b.size = rounded;
  if (!tagged) {
    if (!b.tag.untagged()) retag(addr, rounded, Tag(0));
    b.tag = Tag(0);
  } else if (!(policy_.sticky_reuse && reused && !b.tag.untagged())) {
    const Tag t = draw_tag(policy_.exclude_previous_tag && b.ever_allocated ? std::optional<Tag>(b.last_alloc_tag)
                                                                            : std::nullopt);
    retag(addr, rounded, t);
    b.tag = t;
  }
  b.last_alloc_tag = b.tag;
  b.ever_allocated = true;
  live_[addr] = rounded;
  return make_tagged(addr, b.tag);
}

void TaggedHeap::free(TaggedAddress ptr) {
  const Addr addr = ptr.untagged();
  auto it = live_.find(addr);
  if (it == live_.end()) throw SimError(ErrorKind::kInvalidArgument, "free of a pointer that is not live");
  const std::uint64_t size = it->second;
  live_.erase(it);
  Block& b = blocks_[addr];
  if (!policy_.sticky_reuse && !b.tag.untagged()) {
    const Tag t = draw_tag(b.tag);
    retag(addr, size, t);
    b.tag = t;
  }
  free_lists_[size].push_back(addr);
}

std::vector<AllocEvent> parse_alloc_trace(std::string_view text) {
  std::vector<AllocEvent> out;
  std::size_t lineno = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string verb;
    std::string arg;
    if (!(ls >> verb)) continue;
    std::string extra;
    if (!(ls >> arg) || (ls >> extra) || (verb != "malloc" && verb != "free")) {
      throw SimError(ErrorKind::kParse, "alloc trace line " + std::to_string(lineno) + ": expected `malloc SIZE` or `free ID`");
    }
    AllocEvent e;
    e.is_malloc = verb == "malloc";
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), e.value);
    if (ec != std::errc() || ptr != arg.data() + arg.size()) {
      throw SimError(ErrorKind::kParse, "alloc trace line " + std::to_string(lineno) + ": bad number '" + arg + "'");
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace mtesim
