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

#ifndef MTESIM_ALLOC_HPP_
#define MTESIM_ALLOC_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mtesim/isa.hpp"
#include "mtesim/tagmem.hpp"

namespace mtesim {

struct AllocPolicy {
  std::uint64_t tag_rng_seed = 1;
  // Allocations larger than this stay untagged.
  std::optional<std::uint64_t> selective_threshold;
  // Reused blocks keep the tag they already carry.
  bool sticky_reuse = false;
  // A reused block never receives the tag of its previous allocation.
  bool exclude_previous_tag = false;
};

inline constexpr std::uint64_t kDefaultSelectiveThreshold = 32 * 1024;

enum class BulkTagStrategy { kNaiveStg, kNaiveSt2g, kLinewiseDcGva, kMixedWidth };

std::string_view to_string(BulkTagStrategy s);
BulkTagStrategy parse_bulk_strategy(std::string_view s);

// Tag-op sequence that sets [addr, addr + len) to `tag`.
//
// MixedWidth returns a minimum-length sequence built from DcGva (aligned
// line), St2g (any granule pair) and Stg (single granule).
std::vector<Instruction> bulk_tag(Addr addr, std::uint64_t len, Tag tag, BulkTagStrategy strategy);

// Bump allocator with exact-size free lists over a taggable heap region.
// Every tag change is emitted as tag-op instructions and applied to memory.
class TaggedHeap {
 public:
  TaggedHeap(TaggedMemory& mem, Addr base, std::uint64_t capacity, AllocPolicy policy,
             BulkTagStrategy strategy = BulkTagStrategy::kMixedWidth);

  TaggedAddress malloc(std::uint64_t size);
  void free(TaggedAddress ptr);

  // Tag ops emitted since construction (or the last take).
  const std::vector<Instruction>& tag_ops() const { return ops_; }
  std::vector<Instruction> take_tag_ops() { return std::exchange(ops_, {}); }
  std::uint64_t tag_op_count() const { return op_count_; }

  Addr base() const { return base_; }
  Addr top() const { return bump_; }
  std::size_t live() const { return live_.size(); }

 private:
  struct Block {
    std::uint64_t size = 0;
    Tag tag;
    Tag last_alloc_tag;
    bool ever_allocated = false;
  };

  Tag draw_tag(std::optional<Tag> exclude);
  void retag(Addr addr, std::uint64_t len, Tag tag);

  TaggedMemory& mem_;
  Addr base_;
  Addr end_;
  Addr bump_;
  AllocPolicy policy_;
  BulkTagStrategy strategy_;
  std::mt19937_64 rng_;
  std::unordered_map<Addr, Block> blocks_;
  std::unordered_map<Addr, std::uint64_t> live_;
  std::map<std::uint64_t, std::vector<Addr>> free_lists_;
  std::vector<Instruction> ops_;
  std::uint64_t op_count_ = 0;
};

// One allocation trace line: `malloc <size>` or `free <id>`, where ids
// number malloc lines from 0.
struct AllocEvent {
  bool is_malloc = true;
  std::uint64_t value = 0;
};

std::vector<AllocEvent> parse_alloc_trace(std::string_view text);

}  // namespace mtesim

#endif  // MTESIM_ALLOC_HPP_
