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

#include "mtesim/tracer.hpp"

#include <fmt/format.h>

#include <unordered_map>
#include <unordered_set>

namespace mtesim {

std::string_view to_string(TracerKind k) {
  switch (k) {
    case TracerKind::kMteSignal: return "mte_signal";
    case TracerKind::kMteKernel: return "mte_kernel";
    case TracerKind::kPagePerm: return "page_perm";
    case TracerKind::kDbiInline: return "dbi_inline";
  }
  return "?";
}

TracerKind parse_tracer(std::string_view s) {
  for (TracerKind k : kAllTracers)
    if (to_string(k) == s) return k;
  throw SimError(ErrorKind::kParse, "unknown tracer '" + std::string(s) + "'");
}

std::string to_csv(const TraceEventLog& log) {
  std::string out = "seq,instr,addr,kind\n";
  for (const TraceEvent& e : log)
    out += fmt::format("{},{},0x{:x},{}\n", e.seq, e.instr, e.address, e.is_store ? "store" : "load");
  return out;
}

namespace {

// The flipped tag never equals the tag it replaces.
Tag armed(Tag t) { return Tag(t.value() ^ 0x8); }

}  // namespace

TraceResult trace_run(const Program& program, const TaggedMemory& mem, const std::vector<Granule>& traced,
                      TracerKind kind, const TracerCosts& costs, const CoreProfile& profile) {
  validate(program);
  const bool mte = kind == TracerKind::kMteSignal || kind == TracerKind::kMteKernel;

  std::unordered_set<Addr> granules;
  std::unordered_set<Addr> pages;
  for (const Granule& g : traced) {
    if (!is_aligned(g.base, kGranuleBytes)) {
      throw SimError(ErrorKind::kUnalignedGranule, fmt::format("traced granule 0x{:x} is not aligned", g.base));
    }
    if (!mem.is_mapped(g.base)) throw SimError(ErrorKind::kUnmapped, fmt::format("traced granule 0x{:x}", g.base));
    granules.insert(g.base);
    pages.insert(align_down(g.base, kPageBytes));
  }

  TraceResult r;
  r.final_memory = mem;
  TaggedMemory& m = r.final_memory;
  std::unordered_map<Addr, Tag> original;
  if (mte) {
    for (Addr g : granules) {
      const Tag t = m.get_tag(Granule{g});
      m.set_tag(Granule{g}, armed(t));  // throws kNotTaggable
      original.emplace(g, t);
    }
  }
  auto disarm = [&](Addr g) { m.set_tag(Granule{g}, original.at(g)); };
  auto rearm = [&](Addr g) {
    original[g] = m.get_tag(Granule{g});
    m.set_tag(Granule{g}, armed(original[g]));
  };

  Executor exec(m, CheckConfig{}, MteMode::kOff, /*record_events=*/false);
  std::uint64_t accesses = 0;
  std::vector<Addr> touched;
  for (std::size_t i = 0; i < program.size(); ++i) {
    const Instruction& in = program[i];
    const Addr begin = in.begin();
    const std::uint64_t len = std::max<std::uint64_t>(in.length(), 1);
    touched.clear();

    if (is_data_access(in.op)) {
      ++accesses;
      bool trapped = false;
      bool hit = false;
      for (const Granule& g : granules_for_range(begin, len)) {
        const bool is_traced = granules.count(g.base) != 0;
        const bool taggable = m.attrs(g.base).taggable;
        if (is_traced) {
          hit = true;
          touched.push_back(g.base);
        }
        if (!taggable) continue;
        const bool mismatch = m.get_tag(g) != in.addr.tag();
        if (mismatch && !is_traced) {
          throw SimError(ErrorKind::kUntracedFault,
                         fmt::format("instruction {} mismatches untraced granule 0x{:x}", i, g.base));
        }
        trapped |= mte && mismatch;
      }
      bool detected = false;
      switch (kind) {
        case TracerKind::kMteSignal:
        case TracerKind::kMteKernel: detected = trapped; break;
        case TracerKind::kPagePerm: {
          bool protected_page = false;
          for (Addr p = align_down(begin, kPageBytes); p < begin + len; p += kPageBytes)
            protected_page |= pages.count(p) != 0;
          detected = protected_page && hit;
          if (protected_page && !hit) ++r.spurious;
          break;
        }
        case TracerKind::kDbiInline: detected = hit; break;
      }
      if (detected) r.log.push_back(TraceEvent{r.log.size(), i, in.addr.untagged(), in.op == Op::kStore});
      if (mte && detected) {
        // Log, untag, replay, retag.
        for (Addr g : touched) disarm(g);
        exec.step(in, i);
        for (Addr g : touched) m.set_tag(Granule{g}, armed(original.at(g)));
        continue;
      }
      exec.step(in, i);
      continue;
    }
    if (mte && is_tag_op(in.op)) {
      for (const Granule& g : granules_for_range(begin, len))
        if (granules.count(g.base) != 0) touched.push_back(g.base);
      for (Addr g : touched) disarm(g);
      exec.step(in, i);
      for (Addr g : touched) rearm(g);
      continue;
    }
    exec.step(in, i);
  }
  if (mte)
    for (Addr g : granules) disarm(g);

  const CostReport base = simulate(program, mem, profile, CheckConfig{}, MteMode::kOff);
  const Cycle replay = profile.hit_latency;
  const std::uint64_t events = r.log.size();
  switch (kind) {
    case TracerKind::kMteSignal:
    case TracerKind::kMteKernel:
      r.overhead = 2 * costs.retag_cost * granules.size() +
                   events * (transitions_per_event(kind) * costs.transition_cost + 2 * costs.retag_cost + replay);
      break;
    case TracerKind::kPagePerm:
      r.overhead = 2 * costs.mprotect_cost * pages.size() +
                   (events + r.spurious) * (transitions_per_event(kind) * costs.transition_cost +
                                            2 * costs.mprotect_cost + costs.false_share_check_cost + replay);
      break;
    case TracerKind::kDbiInline: r.overhead = accesses * costs.inline_check_cost + events * costs.log_cost; break;
  }
  r.base_cycles = base.cycles;
  r.report = base;
  r.report.cycles = base.cycles + r.overhead;
  return r;
}

}  // namespace mtesim
