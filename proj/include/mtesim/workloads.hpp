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

// Microbenchmark generators.
//
// A workload is a memory image plus a list of phases. Each phase streams its
// instructions into a sink, with dependency indices relative to the first
// instruction of that phase, so large traversals never have to be
// materialized. The measured phase starts with a drained machine.

#ifndef MTESIM_WORKLOADS_HPP_
#define MTESIM_WORKLOADS_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mtesim/alloc.hpp"
#include "mtesim/isa.hpp"
#include "mtesim/tagmem.hpp"
#include "mtesim/uarch.hpp"

namespace mtesim {

using InstrSink = std::function<void(const Instruction&)>;

struct Phase {
  std::string name;
  bool flush_before = false;
  bool measured = false;
  std::function<void(const InstrSink&)> emit;
};

struct Workload {
  std::string name;
  std::string params;  // canonical `key=value;...` description
  TaggedMemory memory;
  CheckConfig cfg;
  std::vector<Phase> phases;
};

// Concatenation of every phase with dependencies rebased to absolute indices.
Program materialize(const Workload& w);

// Streams all phases through one engine. Cycles cover the measured phase
// only (the whole stream when no phase is marked measured).
CostReport run_workload(const Workload& w, const CoreProfile& profile, MteMode mode);

// Memory budget of a single generated workload.
inline constexpr std::uint64_t kSimMemoryBudget = std::uint64_t{1} << 30;

// Linked-list stride benchmark.
struct LLBenchParams {
  std::uint64_t L = 1;
  std::uint64_t A = 16;
  std::uint64_t S = 16;
  std::uint64_t seed = 1;
  // Visit nodes in random address order; the default lays nodes out in
  // list order.
  bool shuffle = false;

  void validate() const;
};

// Element loads per node: indices 1, 1 + S, ... below A.
constexpr std::uint64_t llbench_loads_per_node(std::uint64_t A, std::uint64_t S) {
  return A <= 1 ? 0 : (A - 1 + S - 1) / S;
}
// Instructions in one traversal: per node a pointer load, one load and one
// add per element, and a branch.
constexpr std::uint64_t llbench_traversal_size(const LLBenchParams& p) {
  return p.L * (2 + 2 * llbench_loads_per_node(p.A, p.S));
}

// Flush, one warm-up traversal, then the measured traversal.
Workload gen_llbench(const LLBenchParams& p);

struct LLBenchResult {
  CostReport mte;
  CostReport off;
  double overhead() const { return mte.slowdown_vs(off); }
};
LLBenchResult run_llbench(const LLBenchParams& p, const CoreProfile& profile, MteMode mode);

// Stores to one fixed address, each followed by an optional DmbSt and a
// three-op dependent loop counter.
Workload gen_store_loop(std::uint64_t iters, bool tagged, bool barrier = false);

enum class ChainKind { kRar, kWaw, kRaw };
std::string_view to_string(ChainKind k);
ChainKind parse_chain_kind(std::string_view s);

struct MemChainParams {
  ChainKind kind = ChainKind::kRar;
  std::uint64_t buffer_bytes = 16u << 20;
  std::uint64_t iters = 1u << 18;  // capped at buffer_bytes / 8
  std::uint64_t seed = 1;
};
Workload gen_memchain(const MemChainParams& p);

enum class Protection { kInsecure, kCopy, kBufLock };
std::string_view to_string(Protection p);
Protection parse_protection(std::string_view s);

struct BufLockScenario {
  std::uint64_t buffer_bytes = 4096;
  std::uint64_t rounds = 16;
  Protection protection = Protection::kInsecure;
};
Workload gen_buflock(const BufLockScenario& s);

// Tags (or copies) one buffer `reps` times from a cold cache.
struct TagBufferParams {
  std::uint64_t bytes = 4096;
  std::uint64_t reps = 8;
  bool copy = false;  // memcpy with 16-byte accesses instead of tagging
  BulkTagStrategy strategy = BulkTagStrategy::kMixedWidth;
};
Workload gen_tag_buffer(const TagBufferParams& p);

// User code alternating with kernel copies out of a kernel buffer larger
// than the cache. Kernel tag-check faults are disabled (tcf = 0).
struct KernelMixParams {
  std::uint64_t kernel_bytes = 4u << 20;
  std::uint64_t user_bytes = 64u << 10;
  std::uint64_t rounds = 64;
};
Workload gen_kernel_mix(const KernelMixParams& p);

// Repeated passes over a cache-resident tagged array with four accumulators.
struct StreamParams {
  std::uint64_t bytes = 32u << 10;
  std::uint64_t passes = 32;
};
Workload gen_stream(const StreamParams& p);

// Linear scan of 8-byte loads over `total_bytes`, of which the first
// `traced_bytes` form the traced buffer on its own pages.
struct SparseScanParams {
  std::uint64_t total_bytes = 1u << 20;
  std::uint64_t traced_bytes = 64;
};
struct SparseScan {
  Program program;
  TaggedMemory memory;
  std::vector<Granule> traced;
};
SparseScan gen_sparse_scan(const SparseScanParams& p);

// Flag-style parameters for the registry (`--L 4 --A 256 ...`).
class WorkloadParams {
 public:
  WorkloadParams() = default;
  explicit WorkloadParams(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  void set(std::string key, std::string value) { kv_[std::move(key)] = std::move(value); }
  std::uint64_t u64(const std::string& key, std::uint64_t def) const;
  bool flag(const std::string& key, bool def) const;
  std::string str(const std::string& key, std::string def) const;
  // Throws kInvalidArgument naming the first key outside `known`.
  void expect_only(std::initializer_list<std::string_view> known) const;
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

struct WorkloadInfo {
  std::string name;
  std::string summary;
  std::string keys;
};
const std::vector<WorkloadInfo>& workload_catalog();

// Throws kUnknownWorkload for names outside the catalog.
Workload make_workload(std::string_view name, const WorkloadParams& params);

}  // namespace mtesim

#endif  // MTESIM_WORKLOADS_HPP_
