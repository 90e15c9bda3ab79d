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

#include "mtesim/isa.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <sstream>

namespace mtesim {

std::string_view to_string(MteMode m) {
  switch (m) {
    case MteMode::kOff: return "off";
    case MteMode::kSync: return "sync";
    case MteMode::kAsync: return "async";
    case MteMode::kAsymm: return "asymm";
  }
  return "?";
}

MteMode parse_mode(std::string_view s) {
  if (s == "off") return MteMode::kOff;
  if (s == "sync") return MteMode::kSync;
  if (s == "async") return MteMode::kAsync;
  if (s == "asymm") return MteMode::kAsymm;
  throw SimError(ErrorKind::kParse, "unknown mode '" + std::string(s) + "'");
}

namespace {

constexpr std::array<std::pair<Op, std::string_view>, 12> kOpNames{{
    {Op::kLoad, "load"},
    {Op::kStore, "store"},
    {Op::kStg, "stg"},
    {Op::kSt2g, "st2g"},
    {Op::kStzg, "stzg"},
    {Op::kStz2g, "stz2g"},
    {Op::kStgp, "stgp"},
    {Op::kDcGva, "dcgva"},
    {Op::kLdg, "ldg"},
    {Op::kDmbSt, "dmbst"},
    {Op::kSyscall, "syscall"},
    {Op::kNop, "nop"},
}};

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

}  // namespace

std::string_view to_string(Op op) {
  for (const auto& [o, name] : kOpNames)
    if (o == op) return name;
  return "?";
}

Op parse_op(std::string_view s) {
  for (const auto& [o, name] : kOpNames)
    if (name == s) return o;
  throw SimError(ErrorKind::kParse, "unknown instruction '" + std::string(s) + "'");
}

Instruction& Instruction::depends_on(std::uint32_t index) {
  if (ndeps == kMaxDeps) throw SimError(ErrorKind::kInvalidArgument, "too many dependencies");
  dep_slots[ndeps++] = index;
  return *this;
}

Addr Instruction::begin() const {
  const Addr a = addr.untagged();
  return op == Op::kDcGva ? align_down(a, kLineBytes) : a;
}

std::uint64_t Instruction::length() const {
  if (is_tag_op(op)) return tag_op_span(op);
  if (is_data_access(op)) return width;
  return 0;
}

Instruction make_load(TaggedAddress a, std::uint32_t width) {
  Instruction i;
  i.op = Op::kLoad;
  i.addr = a;
  i.width = width;
  return i;
}

Instruction make_store(TaggedAddress a, std::uint32_t width, std::uint64_t value) {
  Instruction i;
  i.op = Op::kStore;
  i.addr = a;
  i.width = width;
  i.value = value;
  return i;
}

Instruction make_tag_op(Op op, TaggedAddress a) {
  Instruction i;
  i.op = op;
  i.addr = a;
  i.width = tag_op_span(op);
  return i;
}

Instruction make_plain(Op op) {
  Instruction i;
  i.op = op;
  return i;
}

void validate(const Program& program) {
  for (std::size_t i = 0; i < program.size(); ++i) {
    const Instruction& in = program[i];
    for (std::uint32_t d : in.deps()) {
      if (d >= i) {
        throw SimError(ErrorKind::kInvalidArgument,
                       "instruction " + std::to_string(i) + " depends on non-earlier index " + std::to_string(d));
      }
    }
    if (is_data_access(in.op) && in.width == 0) {
      throw SimError(ErrorKind::kInvalidArgument, "instruction " + std::to_string(i) + " has zero width");
    }
  }
}

namespace {

std::uint64_t parse_uint(std::string_view tok, int base, std::size_t line) {
  if (base == 16 && tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X')) tok.remove_prefix(2);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v, base);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
    throw SimError(ErrorKind::kParse, "line " + std::to_string(line) + ": bad number '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace

Program parse_program(std::string_view text) {
  Program out;
  std::size_t lineno = 0;
  while (!text.empty()) {
    ++lineno;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::vector<std::string_view> toks;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
      std::size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
      if (end > pos) toks.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    if (toks.empty()) continue;
    if (toks.size() < 4) {
      throw SimError(ErrorKind::kParse, "line " + std::to_string(lineno) + ": expected `OP addr width tag`");
    }

    Instruction in;
    in.op = parse_op(toks[0]);
    const Addr addr = parse_uint(toks[1], 16, lineno);
    in.width = static_cast<std::uint32_t>(parse_uint(toks[2], 10, lineno));
    const std::uint64_t tag = parse_uint(toks[3], 16, lineno);
    if (tag > 0xF) throw SimError(ErrorKind::kParse, "line " + std::to_string(lineno) + ": tag out of range");
    in.addr = make_tagged(addr, Tag(static_cast<unsigned>(tag)));
    if (is_tag_op(in.op)) in.width = tag_op_span(in.op);

    for (std::size_t t = 4; t < toks.size(); ++t) {
      const std::string_view tok = toks[t];
      if (tok == "k") {
        in.kernel = true;
      } else if (tok == "dead") {
        in.dead = true;
      } else if (tok.starts_with("v=")) {
        in.value = parse_uint(tok.substr(2), 16, lineno);
      } else {
        const std::uint64_t d = parse_uint(tok, 10, lineno);
        if (d >= out.size()) {
          throw SimError(ErrorKind::kParse, "line " + std::to_string(lineno) + ": dependency " + std::string(tok) +
                                                " does not name an earlier instruction");
        }
        if (in.ndeps == Instruction::kMaxDeps) {
          throw SimError(ErrorKind::kParse, "line " + std::to_string(lineno) + ": too many dependencies");
        }
        in.depends_on(static_cast<std::uint32_t>(d));
      }
    }
    out.push_back(in);
  }
  return out;
}

std::string format_program(const Program& program) {
  std::ostringstream os;
  for (const Instruction& in : program) {
    os << to_string(in.op) << ' ' << hex(in.addr.untagged()) << ' ' << in.width << ' ' << std::hex
       << in.addr.tag().value() << std::dec;
    for (std::uint32_t d : in.deps()) os << ' ' << d;
    if (in.kernel) os << " k";
    if (in.dead) os << " dead";
    if (in.value != 0) os << " v=" << std::hex << in.value << std::dec;
    os << '\n';
  }
  return os.str();
}

std::string_view to_string(CheckOutcome o) {
  switch (o) {
    case CheckOutcome::kPass: return "pass";
    case CheckOutcome::kFail: return "fail";
    case CheckOutcome::kSkipped: return "skipped";
  }
  return "?";
}

CheckResult tag_check(TaggedAddress addr, std::uint32_t width, bool kernel, const TaggedMemory& mem,
                      const CheckConfig& cfg, MteMode mode, bool /*is_store*/) {
  const Addr base = addr.untagged();
  const std::uint64_t len = std::max<std::uint64_t>(width, 1);
  // Unmapped faults take precedence over every skip reason.
  for (Addr p = align_down(base, kPageBytes); p < base + len; p += kPageBytes) (void)mem.attrs(p);

  if (mode == MteMode::kOff) return {CheckOutcome::kSkipped, SkipReason::kModeOff};

  const PageAttrs first = mem.attrs(base);
  bool any_taggable = false;
  for (Addr p = align_down(base, kPageBytes); p < base + len; p += kPageBytes) any_taggable |= mem.attrs(p).taggable;
  if (!any_taggable) return {CheckOutcome::kSkipped, SkipReason::kUntaggable};

  const Tag ptag = addr.tag();
  if (kernel && cfg.tcma1 && first.kernel && ptag.untagged()) return {CheckOutcome::kSkipped, SkipReason::kTcma};
  if (cfg.tco) return {CheckOutcome::kSkipped, SkipReason::kTco};
  if (!(kernel ? cfg.tcf : cfg.tcf0)) return {CheckOutcome::kSkipped, SkipReason::kFaultDisabled};

  const Addr end = align_up(base + len, kGranuleBytes);
  for (Addr g = align_down(base, kGranuleBytes); g < end; g += kGranuleBytes) {
    if (!mem.attrs(g).taggable) continue;
    if (mem.get_tag(Granule{g}) != ptag) return {CheckOutcome::kFail, SkipReason::kNone};
  }
  return {CheckOutcome::kPass, SkipReason::kNone};
}

std::optional<Tag> exec_tag_op(const Instruction& instr, TaggedMemory& mem) {
  const Addr a = instr.addr.untagged();
  const Tag tag = instr.addr.tag();
  switch (instr.op) {
    case Op::kLdg: return mem.get_tag(Granule{align_down(a, kGranuleBytes)});
    case Op::kDcGva: {
      const Addr line = align_down(a, kLineBytes);
      for (Addr g = line; g < line + kLineBytes; g += kGranuleBytes) mem.set_tag(Granule{g}, tag);
      return std::nullopt;
    }
    case Op::kStg:
    case Op::kSt2g:
    case Op::kStzg:
    case Op::kStz2g:
    case Op::kStgp: {
      const std::uint32_t span = tag_op_span(instr.op);
      // Validate every granule before mutating any of them.
      for (Addr g = a; g < a + span; g += kGranuleBytes) (void)mem.get_tag(Granule{g});
      for (Addr g = a; g < a + span; g += kGranuleBytes) mem.set_tag(Granule{g}, tag);
      if (instr.op == Op::kStzg || instr.op == Op::kStz2g) mem.fill(a, span, 0);
      if (instr.op == Op::kStgp) {
        std::array<std::uint8_t, 16> bytes{};
        std::memcpy(bytes.data(), &instr.value, 8);
        std::memcpy(bytes.data() + 8, &instr.value, 8);
        mem.write(a, bytes);
      }
      return std::nullopt;
    }
    default: throw SimError(ErrorKind::kInvalidArgument, "not a tag instruction: " + std::string(to_string(instr.op)));
  }
}

Executor::Executor(TaggedMemory& mem, CheckConfig cfg, MteMode mode, bool record_events)
    : mem_(mem), cfg_(cfg), mode_(mode), record_events_(record_events) {}

void Executor::flush_async(std::size_t at) {
  for (FaultRecord& f : pending_) {
    f.reported_at = at;
    faults_.push_back(f);
  }
  pending_.clear();
}

namespace {

std::uint64_t load_value(const TaggedMemory& mem, Addr a, std::uint32_t width) {
  std::array<std::uint8_t, 8> b{};
  mem.read(a, std::span<std::uint8_t>(b.data(), std::min<std::uint32_t>(width, 8)));
  std::uint64_t v = 0;
  std::memcpy(&v, b.data(), 8);
  return v;
}

void store_value(TaggedMemory& mem, Addr a, std::uint32_t width, std::uint64_t value) {
  std::uint8_t pattern[8];
  std::memcpy(pattern, &value, 8);
  std::vector<std::uint8_t> bytes(width);
  for (std::uint32_t i = 0; i < width; ++i) bytes[i] = pattern[i % 8];
  mem.write(a, bytes);
}

}  // namespace

StepInfo Executor::step(const Instruction& instr, std::size_t index) {
  StepInfo info;
  if (halted_) {
    info.halted = true;
    return info;
  }
  switch (instr.op) {
    case Op::kNop:
    case Op::kDmbSt: return info;
    case Op::kSyscall: flush_async(index); return info;
    case Op::kLoad:
    case Op::kStore: {
      const bool store = instr.op == Op::kStore;
      const Addr a = instr.addr.untagged();
      info.check = tag_check(instr.addr, instr.width, instr.kernel, mem_, cfg_, mode_, store);
      info.sync_check = checks_synchronously(mode_, store);
      info.mte_page = mode_ != MteMode::kOff && mem_.attrs(a).taggable;
      if (info.check.outcome == CheckOutcome::kFail) {
        if (info.sync_check) {
          // Exception entry also reports any deferred mismatch.
          flush_async(index);
          faults_.push_back(FaultRecord{FaultKind::kSyncTagFault, index, instr.addr, index});
          halted_ = true;
          info.halted = true;
          if (record_events_) events_.push_back(ArchEvent{index, instr.op, info.check.outcome, 0});
          return info;
        }
        pending_.push_back(FaultRecord{FaultKind::kAsyncTagFault, std::nullopt, instr.addr, 0});
      }
      if (store) {
        if (!instr.dead) store_value(mem_, a, instr.width, instr.value);
      } else {
        info.value = load_value(mem_, a, instr.width);
      }
      if (record_events_ && !instr.dead) events_.push_back(ArchEvent{index, instr.op, info.check.outcome, info.value});
      return info;
    }
    default: {
      info.mte_page = mode_ != MteMode::kOff && mem_.attrs(instr.addr.untagged()).taggable;
      const std::optional<Tag> t = exec_tag_op(instr, mem_);
      if (t) info.value = t->value();
      if (record_events_) events_.push_back(ArchEvent{index, instr.op, CheckOutcome::kSkipped, info.value});
      return info;
    }
  }
}

void Executor::finish(std::size_t program_size) { flush_async(program_size); }

ExecResult execute(const Program& program, TaggedMemory mem, const CheckConfig& cfg, MteMode mode) {
  validate(program);
  ExecResult r;
  {
    Executor ex(mem, cfg, mode);
    for (std::size_t i = 0; i < program.size(); ++i) {
      if (ex.step(program[i], i).halted) break;
      ++r.executed;
    }
    if (!ex.halted()) ex.finish(program.size());
    r.faults = ex.faults();
    r.events = ex.take_events();
    r.halted = ex.halted();
  }
  r.memory = std::move(mem);
  return r;
}

}  // namespace mtesim
