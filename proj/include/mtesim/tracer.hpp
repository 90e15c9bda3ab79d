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

// Access tracers over a fixed set of granules.
//
// Each tracer detects traced accesses with its own mechanism: the MTE
// tracers flip the tag of every traced granule and catch the resulting
// mismatch, the page tracer revokes access to whole pages, and the inline
// tracer looks every access up in the traced set. Cost is the untraced run
// on the timing model plus a closed-form charge per event.

#ifndef MTESIM_TRACER_HPP_
#define MTESIM_TRACER_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "mtesim/isa.hpp"
#include "mtesim/tagmem.hpp"
#include "mtesim/uarch.hpp"

namespace mtesim {

enum class TracerKind { kMteSignal, kMteKernel, kPagePerm, kDbiInline };

std::string_view to_string(TracerKind k);
TracerKind parse_tracer(std::string_view s);
inline constexpr TracerKind kAllTracers[] = {TracerKind::kMteSignal, TracerKind::kMteKernel, TracerKind::kPagePerm,
                                             TracerKind::kDbiInline};

// User-kernel transitions taken by one traced event.
constexpr unsigned transitions_per_event(TracerKind k) {
  return k == TracerKind::kMteKernel ? 2 : k == TracerKind::kDbiInline ? 0 : 4;
}

struct TracerCosts {
  Cycle transition_cost = 1000;
  Cycle retag_cost = 2;
  Cycle mprotect_cost = 3000;
  Cycle false_share_check_cost = 50;
  Cycle inline_check_cost = 4;
  Cycle log_cost = 10;  // inline tracer's append to its log
};

struct TraceEvent {
  std::size_t seq = 0;
  std::size_t instr = 0;
  Addr address = 0;  // untagged
  bool is_store = false;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

using TraceEventLog = std::vector<TraceEvent>;

// `seq,instr,addr,kind` with a header line.
std::string to_csv(const TraceEventLog& log);

struct TraceResult {
  TraceEventLog log;
  CostReport report;  // cycles = base_cycles + overhead
  Cycle base_cycles = 0;
  Cycle overhead = 0;
  std::uint64_t spurious = 0;  // page faults on untraced data
  TaggedMemory final_memory;
};

// Throws kNotTaggable when an MTE tracer is asked to trace a granule on an
// untaggable page, and kUntracedFault when an access mismatches the tags of
// memory outside the traced set.
TraceResult trace_run(const Program& program, const TaggedMemory& mem, const std::vector<Granule>& traced,
                      TracerKind kind, const TracerCosts& costs, const CoreProfile& profile);

}  // namespace mtesim

#endif  // MTESIM_TRACER_HPP_
