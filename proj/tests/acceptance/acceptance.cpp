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


// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Criteria run concurrently and print in order.

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mtesim/alloc.hpp"
#include "mtesim/analogs.hpp"
#include "mtesim/isa.hpp"
#include "mtesim/tracer.hpp"
#include "mtesim/uarch.hpp"
#include "mtesim/workloads.hpp"
#include "oracle/reference.hpp"

namespace mtesim {
namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double slowdown(const Workload& w, const CoreProfile& p, MteMode m) {
  return run_workload(w, p, m).slowdown_vs(run_workload(w, p, MteMode::kOff));
}

// 1. Stale and out-of-bounds pointers fault at the tag-mismatch rate.
Verdict detection_probability() {
  constexpr Addr kHeap = 0x10000000;
  constexpr int kTrials = 100000;
  TaggedMemory m;
  TaggedHeap heap(m, kHeap, 1 << 20, AllocPolicy{});
  int uaf = 0;
  int oob = 0;
  for (int i = 0; i < kTrials; ++i) {
    const TaggedAddress stale = heap.malloc(48);
    heap.free(stale);
    const TaggedAddress fresh = heap.malloc(48);
    const TaggedAddress next = heap.malloc(48);
    if (tag_check(stale, m, CheckConfig{}, MteMode::kSync, false).outcome == CheckOutcome::kFail) ++uaf;
    if (tag_check(fresh.offset(48), m, CheckConfig{}, MteMode::kSync, false).outcome == CheckOutcome::kFail) ++oob;
    heap.free(next);
    heap.free(fresh);
  }
  const double target = 15.0 / 16.0;
  const double u = double(uaf) / kTrials;
  const double o = double(oob) / kTrials;
  return {std::abs(u - target) <= 0.01 && std::abs(o - target) <= 0.01,
          fmt::format("use-after-free {:.4f}, out-of-bounds {:.4f} over {} trials each (target {:.4f} +- 0.01)", u,
                      o, kTrials, target)};
}

// 2. Tagged stores serialize on perf_x3 only.
Verdict store_cliff() {
  const CoreProfile x3 = preset("perf_x3");
  const CoreProfile big = preset("big_a715");
  const Workload loop = gen_store_loop(10000, true);
  const Workload fenced = gen_store_loop(10000, true, true);
  const CostReport off = run_workload(loop, x3, MteMode::kOff);
  const double x3_sync = run_workload(loop, x3, MteMode::kSync).slowdown_vs(off);
  const double big_sync = slowdown(loop, big, MteMode::kSync);
  const CostReport fenced_off = run_workload(fenced, x3, MteMode::kOff);
  const double fence = fenced_off.slowdown_vs(off);
  const double fence_sync = run_workload(fenced, x3, MteMode::kSync).slowdown_vs(fenced_off);
  const bool pass = x3_sync >= 5.0 && x3_sync <= 9.0 && big_sync <= 1.1 && fence >= 5.0 && fence_sync <= 1.05;
  return {pass, fmt::format("perf_x3 sync {:.3f}, big_a715 sync {:.3f}, barrier loop off {:.3f}, barrier+sync {:.4f}",
                            x3_sync, big_sync, fence, fence_sync)};
}

// 3. Linked-list sweep over array size A, list length L and stride S.
Verdict structural_heatmap() {
  const std::vector<std::uint64_t> arrays = {256, 512, 1024, 2048};
  const std::vector<std::uint64_t> mib = {1, 2, 4, 8, 16};
  const std::vector<std::uint64_t> strides = {4, 128};
  struct Cell {
    std::string profile;
    std::uint64_t S, A, footprint;
    std::future<double> overhead;
  };
  std::vector<Cell> cells;
  for (const char* name : {"big_a715", "perf_x3"}) {
    for (std::uint64_t S : strides) {
      for (std::uint64_t A : arrays) {
        for (std::uint64_t m : mib) {
          LLBenchParams p;
          p.A = A;
          p.S = S;
          p.L = (m << 20) / A;
          cells.push_back({name, S, A, m << 20, std::async(std::launch::async, [p, name] {
                             return run_llbench(p, preset(name), MteMode::kAsync).overhead();
                           })});
        }
      }
    }
  }
  double big_small = 0;
  std::map<std::uint64_t, double> big_max;
  double x3_max = 0;
  for (Cell& c : cells) {
    const double o = c.overhead.get();
    if (c.profile == "perf_x3") {
      x3_max = std::max(x3_max, o);
    } else {
      big_max[c.S] = std::max(big_max[c.S], o);
      if (c.footprint < (8u << 20)) big_small = std::max(big_small, o);
    }
  }
  const bool pass = big_small <= 1.1 && big_max[4] >= 1.3 && big_max[4] <= 1.7 && big_max[128] >= 3.0 &&
                    big_max[128] <= 4.2 && x3_max <= 1.2;
  return {pass, fmt::format("big_a715 max below 8 MiB {:.3f}, max S=4 {:.3f}, max S=128 {:.3f}; perf_x3 max {:.3f}",
                            big_small, big_max[4], big_max[128], x3_max)};
}

// 4. Tag checks interfere with store-to-load forwarding on ampere_one.
Verdict forwarding_interference() {
  MemChainParams p;
  p.kind = ChainKind::kRaw;
  p.iters = 1u << 16;
  const Workload w = gen_memchain(p);
  const double amp = slowdown(w, preset("ampere_one"), MteMode::kSync);
  const double no_fwd = slowdown(w, preset("ampere_one_stlf_off"), MteMode::kSync);
  return {amp >= 1.3 && no_fwd < 1.01,
          fmt::format("raw chain sync/off: ampere_one {:.3f}, ampere_one_stlf_off {:.4f}", amp, no_fwd)};
}

// 5. Kernel accesses through tag-0 pointers cost nothing once tcma1 applies.
Verdict kernel_fix() {
  const Workload w = gen_kernel_mix({});
  const CoreProfile amp = preset("ampere_one");
  const CoreProfile fixed = preset("ampere_one_fixed");
  const CostReport amp_off = run_workload(w, amp, MteMode::kOff);
  const CostReport amp_sync = run_workload(w, amp, MteMode::kSync);
  const CostReport fixed_off = run_workload(w, fixed, MteMode::kOff);
  const CostReport fixed_sync = run_workload(w, fixed, MteMode::kSync);
  const double inflated = amp_sync.slowdown_vs(amp_off);
  const double after = fixed_sync.slowdown_vs(fixed_off);

  bool same_faults = amp_sync.counts.faults == fixed_sync.counts.faults;
  const Program prog = materialize(w);
  for (MteMode m : {MteMode::kSync, MteMode::kAsync}) {
    // Fault behavior is a property of the configuration, not of the core.
    CheckConfig fixed_cfg = w.cfg;
    fixed_cfg.tcma1 = true;
    const ExecResult a = execute(prog, w.memory, w.cfg, m);
    const ExecResult b = execute(prog, w.memory, fixed_cfg, m);
    same_faults = same_faults && a.faults == b.faults && a.memory == b.memory;
  }
  return {inflated > 1.01 && after == 1.0 && same_faults,
          fmt::format("kernel_mix sync/off: ampere_one {:.4f}, ampere_one_fixed {:.4f}; faults identical: {}",
                      inflated, after, same_faults ? "yes" : "no")};
}

// 6. Tracer cost ordering on a sparse scan. A tracer's cost is the overhead
// it adds to the untraced run, which is the same for every kind.
Verdict tracer_ordering() {
  const CoreProfile big = preset("big_a715");
  const std::vector<std::uint64_t> sizes = {64, 256, 1024, 4096};
  bool logs_equal = true;
  bool non_increasing = true;
  double prev = INFINITY;
  std::string ratios;
  std::map<TracerKind, Cycle> smallest;
  for (std::uint64_t traced : sizes) {
    const SparseScan s = gen_sparse_scan(SparseScanParams{1u << 20, traced});
    std::map<TracerKind, TraceResult> r;
    for (TracerKind k : kAllTracers) r.emplace(k, trace_run(s.program, s.memory, s.traced, k, {}, big));
    const std::string ref = to_csv(r.at(TracerKind::kMteSignal).log);
    for (TracerKind k : kAllTracers) logs_equal = logs_equal && to_csv(r.at(k).log) == ref;
    const double ratio = double(r.at(TracerKind::kPagePerm).overhead) / double(r.at(TracerKind::kMteSignal).overhead);
    non_increasing = non_increasing && ratio <= prev;
    prev = ratio;
    ratios += fmt::format("{}{}B {:.3f}", ratios.empty() ? "" : ", ", traced, ratio);
    if (traced == sizes.front())
      for (TracerKind k : kAllTracers) smallest[k] = r.at(k).overhead;
  }
  const bool ordered = smallest[TracerKind::kDbiInline] > smallest[TracerKind::kPagePerm] &&
                       smallest[TracerKind::kPagePerm] > smallest[TracerKind::kMteSignal] &&
                       smallest[TracerKind::kMteSignal] >= smallest[TracerKind::kMteKernel];
  const double first = double(smallest[TracerKind::kPagePerm]) / double(smallest[TracerKind::kMteSignal]);
  const bool pass = ordered && first >= 1.5 && first <= 3.0 && non_increasing && logs_equal;
  return {pass, fmt::format("overhead cycles at {}B: dbi {}, page {}, signal {}, kernel {}; page/signal {}; logs identical: {}",
                            sizes.front(), smallest[TracerKind::kDbiInline], smallest[TracerKind::kPagePerm],
                            smallest[TracerKind::kMteSignal], smallest[TracerKind::kMteKernel], ratios,
                            logs_equal ? "yes" : "no")};
}

// 7. Retagging beats copying except where tagged stores serialize.
Verdict buflock() {
  bool pass = true;
  std::string detail;
  for (const char* name : {"big_a715", "little_a510", "ampere_one", "perf_x3"}) {
    const CoreProfile p = preset(name);
    Cycle c[2];
    for (int i = 0; i < 2; ++i) {
      BufLockScenario s;
      s.protection = i == 0 ? Protection::kCopy : Protection::kBufLock;
      c[i] = run_workload(gen_buflock(s), p, MteMode::kSync).cycles;
    }
    const bool want_lock_cheaper = std::string(name) != "perf_x3";
    pass = pass && (want_lock_cheaper ? c[1] < c[0] : c[1] > c[0]);
    detail += fmt::format("{}{} copy {} buflock {}", detail.empty() ? "" : "; ", name, c[0], c[1]);
  }
  return {pass, detail};
}

// 8. Bulk-tag strategies agree with per-granule enumeration.
Verdict bulk_tag_strategies() {
  constexpr Addr kBase = 0x40000;
  constexpr BulkTagStrategy kAll[] = {BulkTagStrategy::kNaiveStg, BulkTagStrategy::kNaiveSt2g,
                                      BulkTagStrategy::kLinewiseDcGva, BulkTagStrategy::kMixedWidth};
  std::mt19937_64 rng(8);
  int bad_state = 0;
  int bad_order = 0;
  constexpr int kCases = 10000;
  for (int n = 0; n < kCases; ++n) {
    const Addr addr = kBase + 64 + (rng() % 256) * 16;
    const std::uint64_t len = (rng() % 64) * 16;
    const Tag tag(1 + rng() % 15);
    std::size_t ops[4] = {};
    for (std::size_t s = 0; s < 4; ++s) {
      const bool line_ok = is_aligned(addr, kLineBytes) && len % kLineBytes == 0;
      if (kAll[s] == BulkTagStrategy::kLinewiseDcGva && !line_ok) continue;
      TaggedMemory m;
      m.map(kBase, 3 * kPageBytes, PageAttrs{true, false});
      const std::vector<Instruction> seq = bulk_tag(addr, len, tag, kAll[s]);
      ops[s] = seq.size();
      for (const Instruction& i : seq) exec_tag_op(i, m);
      for (Addr g = kBase; g < kBase + 3 * kPageBytes; g += kGranuleBytes) {
        const Tag want = g >= addr && g < addr + len ? tag : Tag(0);
        if (m.get_tag(Granule{g}) != want) {
          ++bad_state;
          break;
        }
      }
    }
    if (!(ops[3] <= ops[1] && ops[1] <= ops[0])) ++bad_order;
  }
  return {bad_state == 0 && bad_order == 0,
          fmt::format("{} cases: {} tag-state mismatches, {} op-count ordering violations", kCases, bad_state,
                      bad_order)};
}

// 9. The software analogs err in opposite directions.
Verdict analog_divergence() {
  std::vector<CoreProfile> profiles;
  for (const char* n : {"perf_x3", "big_a715", "little_a510", "ampere_one"}) profiles.push_back(preset(n));
  const std::vector<AnalogRow> rows =
      compare_analogs(analog_workload_set(), profiles, {MteMode::kSync, MteMode::kAsync});
  const AnalogRow* cliff = nullptr;
  const AnalogRow* over = nullptr;
  for (const AnalogRow& r : rows) {
    if (!cliff && r.real >= 5.0 && r.hakc <= 1.1) cliff = &r;
    if (!over && r.real <= 1.05 && r.sfitag >= 1.5 * r.real) over = &r;
  }
  std::string detail;
  if (cliff)
    detail += fmt::format("hakc {:.3f} vs real {:.3f} on {}/{}/{}", cliff->hakc, cliff->real, cliff->workload,
                          cliff->profile, to_string(cliff->mode));
  else
    detail += "no row with hakc <= 1.1 and real >= 5";
  if (over)
    detail += fmt::format("; sfitag {:.3f} vs real {:.3f} on {}/{}/{}", over->sfitag, over->real, over->workload,
                          over->profile, to_string(over->mode));
  else
    detail += "; no row with real <= 1.05 and sfitag >= 1.5x real";
  return {cliff && over, detail};
}

// 10. Engine and executor agree with the independent reference models.
Verdict oracle_equivalence() {
  constexpr int kCases = 1000;
  std::mt19937_64 rng(10);
  int timing = 0;
  int arch = 0;
  for (int n = 0; n < kCases; ++n) {
    const oracle::RandomCase c = oracle::random_case(rng);
    const CostReport fast = simulate(c.program, c.memory.build(), c.profile, c.cfg, c.mode);
    const CostReport slow = oracle::brute_simulate(c.program, c.memory, c.profile, c.cfg, c.mode);
    if (!(fast == slow)) ++timing;
    const ExecResult got = execute(c.program, c.memory.build(), c.cfg, c.mode);
    oracle::RefMachine ref(c.memory, c.cfg, c.mode);
    const oracle::RefExec want = oracle::ref_execute(c.program, ref);
    if (got.faults != want.faults || got.events != want.events || got.executed != want.executed ||
        got.halted != want.halted || !ref.same_state(got.memory))
      ++arch;
  }
  return {timing == 0 && arch == 0,
          fmt::format("{} programs: {} cycle/counter mismatches, {} architectural mismatches", kCases, timing, arch)};
}

// 11. Mode invariants on single-fault programs.
Verdict mode_invariants() {
  constexpr int kCases = 1000;
  std::mt19937_64 rng(11);
  int equivalence = 0;
  int precision = 0;
  int reporting = 0;
  for (int n = 0; n < kCases; ++n) {
    oracle::SingleFault s = oracle::single_fault_program(rng);

    Program clean = s.program;
    clean.erase(clean.begin() + static_cast<std::ptrdiff_t>(s.fault_at));
    const ExecResult off = execute(clean, s.memory, CheckConfig{}, MteMode::kOff);
    for (MteMode m : {MteMode::kSync, MteMode::kAsync, MteMode::kAsymm}) {
      const ExecResult r = execute(clean, s.memory, CheckConfig{}, m);
      if (!r.faults.empty() || !(r.memory == off.memory)) ++equivalence;
    }

    const ExecResult sync = execute(s.program, s.memory, CheckConfig{}, MteMode::kSync);
    const Program prefix(s.program.begin(), s.program.begin() + static_cast<std::ptrdiff_t>(s.fault_at));
    const ExecResult before = execute(prefix, s.memory, CheckConfig{}, MteMode::kOff);
    if (sync.faults.size() != 1 || sync.faults[0].instr_index != s.fault_at || !(sync.memory == before.memory))
      ++precision;

    s.program.push_back(make_plain(Op::kSyscall));
    std::size_t next = s.fault_at + 1;
    while (s.program[next].op != Op::kSyscall) ++next;
    const ExecResult async = execute(s.program, s.memory, CheckConfig{}, MteMode::kAsync);
    if (async.faults.size() != 1 || async.faults[0].reported_at != next) ++reporting;
  }
  return {equivalence == 0 && precision == 0 && reporting == 0,
          fmt::format("{} programs: {} equivalence, {} sync precision, {} async reporting violations", kCases,
                      equivalence, precision, reporting)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace
}  // namespace mtesim

int main() {
  using namespace mtesim;
  const std::vector<Criterion> criteria = {
      {1, "detection probability", detection_probability},
      {2, "store serialization cliff", store_cliff},
      {3, "structural-hazard heatmap", structural_heatmap},
      {4, "forwarding interference", forwarding_interference},
      {5, "kernel tag-check fix", kernel_fix},
      {6, "tracer ordering", tracer_ordering},
      {7, "buflock vs copy", buflock},
      {8, "bulk-tag strategies", bulk_tag_strategies},
      {9, "analog divergence", analog_divergence},
      {10, "oracle equivalence", oracle_equivalence},
      {11, "mode invariants", mode_invariants},
  };
  std::vector<std::future<Verdict>> results;
  for (const Criterion& c : criteria) {
    results.push_back(std::async(std::launch::async, [&c] {
      try {
        return c.run();
      } catch (const std::exception& e) {
        return Verdict{false, std::string("threw: ") + e.what()};
      }
    }));
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Verdict v = results[i].get();
    failed += v.pass ? 0 : 1;
    fmt::print("{} {:>2} {}: {}\n", v.pass ? "PASS" : "FAIL", criteria[i].id, criteria[i].name, v.detail);
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
