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

#ifndef MTESIM_ISA_HPP_
#define MTESIM_ISA_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mtesim/tagmem.hpp"
#include "mtesim/types.hpp"

namespace mtesim {

enum class MteMode { kOff, kSync, kAsync, kAsymm };

std::string_view to_string(MteMode m);
MteMode parse_mode(std::string_view s);

// Whether a mismatch on this access kind is reported precisely.
constexpr bool checks_synchronously(MteMode mode, bool is_store) {
  return mode == MteMode::kSync || (mode == MteMode::kAsymm && !is_store);
}

// Tag-check control registers.
struct CheckConfig {
  bool tcf0 = true;    // faults enabled for user accesses
  bool tcf = true;     // faults enabled for kernel accesses
  bool tco = false;    // global check override
  bool tcma1 = false;  // tag-0 kernel accesses to kernel mappings are unchecked
};

// Whether suppressing faults via tcf/tcf0/tco still performs the comparison.
// Only the timing model looks at this; architectural outcomes are the same.
struct FaultBehaviorProfile {
  bool suppressed_checks_still_cost = false;
};

enum class Op : std::uint8_t {
  kLoad,
  kStore,
  kStg,
  kSt2g,
  kStzg,
  kStz2g,
  kStgp,
  kDcGva,
  kLdg,
  kDmbSt,
  kSyscall,
  kNop,
};

std::string_view to_string(Op op);
Op parse_op(std::string_view s);

constexpr bool is_load(Op op) { return op == Op::kLoad; }
constexpr bool is_store(Op op) { return op == Op::kStore; }
constexpr bool is_data_access(Op op) { return op == Op::kLoad || op == Op::kStore; }
constexpr bool is_tag_write(Op op) {
  return op == Op::kStg || op == Op::kSt2g || op == Op::kStzg || op == Op::kStz2g || op == Op::kStgp ||
         op == Op::kDcGva;
}
constexpr bool is_tag_op(Op op) { return is_tag_write(op) || op == Op::kLdg; }
constexpr bool is_memory_op(Op op) { return is_data_access(op) || is_tag_op(op); }

// Bytes whose tags a tag op covers (0 for non-tag ops).
constexpr std::uint32_t tag_op_span(Op op) {
  switch (op) {
    case Op::kStg:
    case Op::kStzg:
    case Op::kStgp:
    case Op::kLdg: return 16;
    case Op::kSt2g:
    case Op::kStz2g: return 32;
    case Op::kDcGva: return 64;
    default: return 0;
  }
}

struct Instruction {
  static constexpr std::size_t kMaxDeps = 3;

  Op op = Op::kNop;
  TaggedAddress addr;
  std::uint32_t width = 0;
  bool kernel = false;
  // Timing-only filler: a dead store leaves memory unchanged and dead
  // accesses are not logged. The analog rewriter emits these.
  bool dead = false;
  std::uint64_t value = 0;
  std::array<std::uint32_t, kMaxDeps> dep_slots{};
  std::uint8_t ndeps = 0;

  std::span<const std::uint32_t> deps() const { return {dep_slots.data(), ndeps}; }
  Instruction& depends_on(std::uint32_t index);

  // Byte range touched by the instruction (data or tags).
  Addr begin() const;
  std::uint64_t length() const;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

Instruction make_load(TaggedAddress a, std::uint32_t width);
Instruction make_store(TaggedAddress a, std::uint32_t width, std::uint64_t value = 0);
Instruction make_tag_op(Op op, TaggedAddress a);
Instruction make_plain(Op op);

using Program = std::vector<Instruction>;

// Throws kInvalidArgument when a dependency does not point backwards.
void validate(const Program& program);

// Text format: one instruction per line, `OP addr_hex width tag [deps...]`,
// optionally followed by `k` (kernel access), `dead`, and `v=<hex>` (store
// data). `#` starts a comment.
Program parse_program(std::string_view text);
std::string format_program(const Program& program);

enum class CheckOutcome { kPass, kFail, kSkipped };

enum class SkipReason { kNone, kModeOff, kUntaggable, kTcma, kTco, kFaultDisabled };

struct CheckResult {
  CheckOutcome outcome = CheckOutcome::kSkipped;
  SkipReason reason = SkipReason::kNone;

  // Whether the comparison is physically carried out.
  bool performed(const FaultBehaviorProfile& fb) const {
    if (outcome != CheckOutcome::kSkipped) return true;
    return fb.suppressed_checks_still_cost &&
           (reason == SkipReason::kTco || reason == SkipReason::kFaultDisabled);
  }
};

std::string_view to_string(CheckOutcome o);

// Compares the pointer tag against every granule in [addr, addr + width).
CheckResult tag_check(TaggedAddress addr, std::uint32_t width, bool kernel, const TaggedMemory& mem,
                      const CheckConfig& cfg, MteMode mode, bool is_store);

inline CheckResult tag_check(TaggedAddress addr, const TaggedMemory& mem, const CheckConfig& cfg, MteMode mode,
                             bool is_store) {
  return tag_check(addr, 1, false, mem, cfg, mode, is_store);
}

enum class FaultKind { kSyncTagFault, kAsyncTagFault };

struct FaultRecord {
  FaultKind kind = FaultKind::kSyncTagFault;
  std::optional<std::size_t> instr_index;  // precise faults only
  TaggedAddress address;
  std::size_t reported_at = 0;  // instruction index (program size == end)

  friend bool operator==(const FaultRecord&, const FaultRecord&) = default;
};

struct ArchEvent {
  std::size_t index = 0;
  Op op = Op::kNop;
  CheckOutcome check = CheckOutcome::kSkipped;
  std::uint64_t value = 0;  // loaded data, or the tag read by ldg

  friend bool operator==(const ArchEvent&, const ArchEvent&) = default;
};

// Applies a tag-manipulation instruction. Returns the tag read by Ldg.
std::optional<Tag> exec_tag_op(const Instruction& instr, TaggedMemory& mem);

// What the timing model needs to know about one executed instruction.
struct StepInfo {
  bool halted = false;  // precise fault; the instruction had no effect
  CheckResult check;
  bool sync_check = false;
  bool mte_page = false;  // tags of the touched memory are live for this run
  std::uint64_t value = 0;
};

// Single-threaded interpreter holding the asynchronous fault flag.
class Executor {
 public:
  Executor(TaggedMemory& mem, CheckConfig cfg, MteMode mode, bool record_events = true);

  StepInfo step(const Instruction& instr, std::size_t index);
  // Reports faults still pending at end of program.
  void finish(std::size_t program_size);

  bool halted() const { return halted_; }
  bool async_flag() const { return !pending_.empty(); }
  std::size_t pending_faults() const { return pending_.size(); }
  const std::vector<FaultRecord>& faults() const { return faults_; }
  const std::vector<ArchEvent>& events() const { return events_; }
  std::vector<ArchEvent> take_events() { return std::move(events_); }
  MteMode mode() const { return mode_; }

 private:
  void flush_async(std::size_t at);

  TaggedMemory& mem_;
  CheckConfig cfg_;
  MteMode mode_;
  bool record_events_;
  bool halted_ = false;
  std::vector<FaultRecord> pending_;
  std::vector<FaultRecord> faults_;
  std::vector<ArchEvent> events_;
};

struct ExecResult {
  TaggedMemory memory;
  std::vector<FaultRecord> faults;
  std::vector<ArchEvent> events;
  std::size_t executed = 0;
  bool halted = false;
};

ExecResult execute(const Program& program, TaggedMemory mem, const CheckConfig& cfg, MteMode mode);

}  // namespace mtesim

#endif  // MTESIM_ISA_HPP_
