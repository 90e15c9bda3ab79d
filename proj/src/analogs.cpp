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

#include "mtesim/analogs.hpp"

#include <fmt/format.h>

#include <memory>

namespace mtesim {

std::string_view to_string(AnalogKind k) { return k == AnalogKind::kHakc ? "hakc" : "sfitag"; }

AnalogKind parse_analog(std::string_view s) {
  if (s == "hakc") return AnalogKind::kHakc;
  if (s == "sfitag") return AnalogKind::kSfiTag;
  throw SimError(ErrorKind::kParse, "unknown analog '" + std::string(s) + "'");
}

void AnalogRewriter::operator()(const Instruction& in) {
  Instruction x = in;
  for (std::uint8_t k = 0; k < x.ndeps; ++k) x.dep_slots[k] = index_[x.dep_slots[k]];

  if (is_tag_op(x.op)) {
    const TaggedAddress at = make_tagged(x.begin(), Tag(0));
    const auto width = static_cast<std::uint32_t>(x.length());
    Instruction plain = x.op == Op::kLdg ? make_load(at, width) : make_store(at, width);
    plain.dep_slots = x.dep_slots;
    plain.ndeps = x.ndeps;
    plain.kernel = x.kernel;
    plain.dead = true;
    x = plain;
  }

  index_.push_back(static_cast<std::uint32_t>(emitted_));
  out_(x);
  ++emitted_;

  if (kind_ == AnalogKind::kSfiTag && is_data_access(in.op) && !x.dead) {
    Instruction dummy = make_load(make_tagged(align_down(x.addr.untagged(), kLineBytes), Tag(0)), 8);
    dummy.dep_slots = x.dep_slots;
    dummy.ndeps = x.ndeps;
    dummy.kernel = x.kernel;
    dummy.dead = true;
    out_(dummy);
    ++emitted_;
  }
}

Program apply_analog(const Program& program, AnalogKind kind) {
  validate(program);
  Program out;
  AnalogRewriter rw(kind, [&](const Instruction& in) { out.push_back(in); });
  for (const Instruction& in : program) rw(in);
  return out;
}

Workload apply_analog(const Workload& w, AnalogKind kind) {
  Workload out = w;
  out.name = w.name + "+" + std::string(to_string(kind));
  for (Phase& ph : out.phases) {
    auto inner = std::move(ph.emit);
    ph.emit = [inner = std::move(inner), kind](const InstrSink& sink) {
      AnalogRewriter rw(kind, sink);
      inner([&](const Instruction& in) { rw(in); });
    };
  }
  return out;
}

namespace {

Instruction without_tag_op(const Instruction& in) {
  if (!is_tag_op(in.op)) return in;
  Instruction nop = make_plain(Op::kNop);
  nop.dep_slots = in.dep_slots;
  nop.ndeps = in.ndeps;
  return nop;
}

}  // namespace

Program strip_tag_ops(const Program& program) {
  Program out;
  out.reserve(program.size());
  for (const Instruction& in : program) out.push_back(without_tag_op(in));
  return out;
}

Workload strip_tag_ops(const Workload& w) {
  Workload out = w;
  for (Phase& ph : out.phases) {
    auto inner = std::move(ph.emit);
    ph.emit = [inner = std::move(inner)](const InstrSink& sink) {
      inner([&](const Instruction& in) { sink(without_tag_op(in)); });
    };
  }
  return out;
}

std::vector<AnalogCase> analog_workload_set() {
  std::vector<AnalogCase> set;
  set.push_back({"store_loop", gen_store_loop(4000, true)});
  set.push_back({"stream", gen_stream(StreamParams{16u << 10, 16})});
  {
    LLBenchParams p;
    p.A = 1024;
    p.S = 128;
    p.L = (16u << 20) / p.A;
    set.push_back({"llbench_16M_S128", gen_llbench(p)});
  }
  {
    MemChainParams p;
    p.kind = ChainKind::kWaw;
    p.buffer_bytes = 4u << 20;
    p.iters = 1u << 14;
    set.push_back({"memchain_waw", gen_memchain(p)});
  }
  {
    BufLockScenario s;
    s.protection = Protection::kBufLock;
    s.rounds = 4;
    set.push_back({"buflock", gen_buflock(s)});
  }
  set.push_back({"tag_buffer", gen_tag_buffer(TagBufferParams{})});
  return set;
}

std::vector<AnalogRow> compare_analogs(const std::vector<AnalogCase>& cases, const std::vector<CoreProfile>& profiles,
                                       const std::vector<MteMode>& modes) {
  std::vector<AnalogRow> rows;
  for (const AnalogCase& c : cases) {
    const Workload hakc = apply_analog(c.workload, AnalogKind::kHakc);
    const Workload sfi = apply_analog(c.workload, AnalogKind::kSfiTag);
    for (const CoreProfile& p : profiles) {
      const CostReport off = run_workload(strip_tag_ops(c.workload), p, MteMode::kOff);
      const double hakc_pred = run_workload(hakc, p, MteMode::kOff).slowdown_vs(off);
      const double sfi_pred = run_workload(sfi, p, MteMode::kOff).slowdown_vs(off);
      for (MteMode m : modes) {
        AnalogRow r;
        r.workload = c.label;
        r.profile = p.name;
        r.mode = m;
        r.real = run_workload(c.workload, p, m).slowdown_vs(off);
        r.hakc = hakc_pred;
        r.sfitag = sfi_pred;
        rows.push_back(r);
      }
    }
  }
  return rows;
}

std::optional<AnalogRow> divergence_witness(const std::vector<AnalogRow>& rows) {
  for (const AnalogRow& r : rows) {
    const double h = r.hakc - r.real;
    const double s = r.sfitag - r.real;
    if ((h < 0 && s > 0) || (h > 0 && s < 0)) return r;
  }
  return std::nullopt;
}

std::string analog_csv(const std::vector<AnalogRow>& rows) {
  std::string out = "workload,profile,mode,real,hakc,sfitag,hakc_error,sfitag_error\n";
  for (const AnalogRow& r : rows) {
    out += fmt::format("{},{},{},{:.4f},{:.4f},{:.4f},{:+.4f},{:+.4f}\n", r.workload, r.profile, to_string(r.mode),
                       r.real, r.hakc, r.sfitag, r.hakc_error(), r.sfitag_error());
  }
  return out;
}

}  // namespace mtesim
