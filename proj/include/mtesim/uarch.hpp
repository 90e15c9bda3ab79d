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

// Timing model.
//
// Instructions dispatch in program order into a window of rob_size entries,
// execute when their operands are ready and retire in order. Every capacity
// limit (dispatch width, ROB, execution ports, load queue, store buffer,
// tag-check slots) is enforced at dispatch, where all occupancy intervals of
// older instructions have already been fixed. That keeps the earliest legal
// dispatch cycle well defined, so a cycle-stepping scheduler reproduces the
// event-driven one exactly.

#ifndef MTESIM_UARCH_HPP_
#define MTESIM_UARCH_HPP_

#include <array>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "mtesim/isa.hpp"
#include "mtesim/tagmem.hpp"
#include "mtesim/types.hpp"

namespace mtesim {

enum class PrefetchKind { kNone, kNextLine, kStride };

std::string_view to_string(PrefetchKind p);
PrefetchKind parse_prefetch(std::string_view s);

inline constexpr std::size_t kNumOps = 12;

struct CoreProfile {
  std::string name = "generic";

  // Front end and window.
  std::uint32_t issue_width = 4;
  std::uint32_t rob_size = 128;
  std::uint32_t lq_size = 32;
  std::uint32_t sb_size = 24;

  // Execution ports. An op holds one unit of its class for occupancy[op]
  // cycles; throughput is units / occupancy.
  std::uint32_t load_units = 2;
  std::uint32_t store_units = 2;
  std::array<std::uint32_t, kNumOps> occupancy{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};

  // Memory system.
  std::uint64_t llc_bytes = 8u << 20;
  std::uint32_t llc_ways = 16;
  std::uint32_t line_bytes = 64;
  Cycle hit_latency = 4;
  Cycle miss_latency = 200;
  Cycle mem_interval = 4;       // channel occupancy per data fill
  Cycle tag_fetch_latency = 0;  // reserved-region tag read, after the data
  Cycle tag_fetch_interval = 1;
  TagStorageScheme storage = TagStorageScheme::kReservedRegion;
  PrefetchKind prefetch = PrefetchKind::kNextLine;
  std::uint32_t prefetch_degree = 2;

  // Store pipeline.
  Cycle store_drain_latency = 4;
  bool serialized_mte_stores = false;
  Cycle store_tagcheck_roundtrip = 7;

  // Tag checking.
  std::uint32_t tag_check_slots = 8;
  Cycle tag_check_hold = 0;  // minimum slot occupancy of a performed check
  Cycle sync_load_latency = 0;
  bool suppressed_checks_still_cost = false;

  // Store-to-load forwarding.
  bool stlf_enabled = true;
  bool stlf_tag_aware = true;
  double stlf_fail_prob = 0.5;
  Cycle stlf_latency = 1;
  std::uint64_t seed = 1;

  std::uint32_t op_occupancy(Op op) const { return occupancy[static_cast<std::size_t>(op)]; }
  double load_throughput() const { return double(load_units) / op_occupancy(Op::kLoad); }
  double store_throughput() const { return double(store_units) / op_occupancy(Op::kStore); }
  FaultBehaviorProfile fault_behavior() const { return {suppressed_checks_still_cost}; }

  // Throws kInvalidArgument on an inconsistent profile.
  void validate() const;
};

// Port class an op executes on, or none.
enum class PortClass { kNone, kLoad, kStore };
PortClass port_class(Op op);

// Ops that hold a store-buffer entry until they drain.
constexpr bool uses_store_buffer(Op op) { return op == Op::kStore || is_tag_write(op); }
// Ops whose data can be forwarded to a younger load.
constexpr bool writes_data(Op op) {
  return op == Op::kStore || op == Op::kStgp || op == Op::kStzg || op == Op::kStz2g;
}
constexpr bool uses_load_queue(Op op) { return op == Op::kLoad || op == Op::kLdg; }

struct CostCounters {
  std::uint64_t instructions = 0;
  std::uint64_t tag_checks = 0;
  std::uint64_t tag_check_stalls = 0;
  std::uint64_t slot_stalls = 0;
  std::uint64_t stlf_hits = 0;
  std::uint64_t stlf_misses = 0;
  std::uint64_t line_misses = 0;
  std::uint64_t extra_tag_transactions = 0;
  std::uint64_t faults = 0;

  friend bool operator==(const CostCounters&, const CostCounters&) = default;
};

struct CostReport {
  Cycle cycles = 0;
  CostCounters counts;

  double slowdown_vs(const CostReport& baseline) const;
  friend bool operator==(const CostReport&, const CostReport&) = default;
};

// Single-level set-associative LRU cache whose lines carry separate data
// and tag arrival times.
class CacheModel {
 public:
  struct Line {
    Addr line = kInvalid;
    Cycle data_ready = 0;
    Cycle tag_ready = 0;
    std::uint64_t stamp = 0;
    bool prefetched = false;
  };
  static constexpr Addr kInvalid = ~Addr{0};

  CacheModel(std::uint64_t bytes, std::uint32_t ways, std::uint32_t line_bytes);

  // Present line or nullptr; does not update recency.
  const Line* find(Addr line) const;
  // Marks a present line most recently used.
  Line& touch(Addr line);
  // Installs a line, evicting the LRU way of its set.
  Line& install(Addr line, Cycle data_ready, Cycle tag_ready, bool prefetched);
  void flush();
  std::size_t sets() const { return sets_; }

 private:
  std::size_t set_of(Addr line) const { return static_cast<std::size_t>(line % sets_); }

  std::size_t sets_;
  std::uint32_t ways_;
  std::vector<Line> lines_;
  std::uint64_t clock_ = 0;
};

// Event-driven timing engine. Instructions are streamed through issue();
// dependency indices are absolute positions in the stream.
class Engine {
 public:
  // Longest dependency distance the engine can resolve.
  static constexpr std::size_t kWindow = std::size_t{1} << 16;

  Engine(const CoreProfile& profile, TaggedMemory& mem, const CheckConfig& cfg, MteMode mode);

  // Returns false once a precise fault has halted the stream.
  bool issue(const Instruction& instr);
  // Drops every cached line.
  void flush_cache();
  // Drains the machine, then restarts the clock and counters.
  void begin_measurement();
  CostReport report() const;

  std::size_t issued() const { return index_; }
  const Executor& executor() const { return exec_; }

 private:
  struct Access {
    Cycle data = 0;
    Cycle tag = 0;
  };
  struct SbEntry {
    Addr begin = 0;
    Addr end = 0;
    Cycle exec = 0;
    Cycle drain = 0;
    bool data = false;
  };

  bool tag_fill(bool mte_page) const;
  // Timing of a cache access at `at` without changing any state.
  Access probe(Addr begin, Addr end, Cycle at, bool mte_page) const;
  // Same access, committing fills and recency.
  Access access(Addr begin, Addr end, Cycle at, bool mte_page, bool demand_load, bool allocate_only);
  void fill(Addr line, Cycle at, bool mte_page, bool prefetched, CacheModel::Line** out);
  void train_prefetcher(Addr line, bool demand_miss, bool was_prefetched, Cycle at, bool mte_page);
  const SbEntry* forward_source(Addr begin, Addr end, Cycle at) const;
  bool forward_fails(std::size_t index) const;
  Cycle& ready_at(std::size_t index) { return ready_[index % kWindow]; }

  CoreProfile p_;
  TaggedMemory& mem_;
  CheckConfig cfg_;
  MteMode mode_;
  Executor exec_;
  CacheModel cache_;

  std::size_t index_ = 0;
  bool halted_ = false;
  Cycle base_ = 0;
  Cycle floor_ = 0;
  Cycle last_dispatch_ = 0;
  std::uint32_t dispatched_in_cycle_ = 0;
  Cycle last_retire_ = 0;
  Cycle last_drain_ = 0;
  Cycle fence_ = 0;
  bool fence_from_mte_ = false;
  Cycle channel_free_ = 0;
  Cycle end_ = 0;
  std::size_t fault_base_ = 0;

  std::vector<Cycle> ready_;   // completion time, by stream index
  std::vector<Cycle> retire_;  // retire time, by stream index
  std::vector<Cycle> load_units_;
  std::vector<Cycle> store_units_;
  std::deque<Cycle> lq_;
  std::deque<SbEntry> sb_;
  std::priority_queue<Cycle, std::vector<Cycle>, std::greater<>> slots_;

  Addr stride_last_ = CacheModel::kInvalid;
  std::int64_t stride_delta_ = 0;

  CostCounters counts_;
};

CostReport simulate(const Program& program, const TaggedMemory& mem, const CoreProfile& profile,
                    const CheckConfig& cfg, MteMode mode);

// Steady-state rate of a homogeneous, independent loop of `op`.
double instruction_throughput(const CoreProfile& profile, Op op, MteMode mode, bool page_tagged);

// Calibrated presets.
std::vector<std::string> preset_names();
CoreProfile preset(std::string_view name);

// Profiles as JSON documents (comments allowed). Unknown keys are errors;
// a document may name a preset in "base" and override individual fields.
CoreProfile profile_from_json(std::string_view text);
std::string profile_to_json(const CoreProfile& profile);
// Resolves a preset name or a path to a profile document.
CoreProfile load_profile(std::string_view name_or_path);

}  // namespace mtesim

#endif  // MTESIM_UARCH_HPP_
