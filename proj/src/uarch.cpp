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

#include "mtesim/uarch.hpp"

#include <algorithm>
#include <bit>
#include <limits>

namespace mtesim {

namespace {

constexpr Cycle kNever = std::numeric_limits<Cycle>::max();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::string_view to_string(PrefetchKind p) {
  switch (p) {
    case PrefetchKind::kNone: return "none";
    case PrefetchKind::kNextLine: return "nextline";
    case PrefetchKind::kStride: return "stride";
  }
  return "?";
}

PrefetchKind parse_prefetch(std::string_view s) {
  if (s == "none") return PrefetchKind::kNone;
  if (s == "nextline") return PrefetchKind::kNextLine;
  if (s == "stride") return PrefetchKind::kStride;
  throw SimError(ErrorKind::kParse, "unknown prefetcher '" + std::string(s) + "'");
}

PortClass port_class(Op op) {
  switch (op) {
    case Op::kLoad:
    case Op::kLdg: return PortClass::kLoad;
    case Op::kStore:
    case Op::kStg:
    case Op::kSt2g:
    case Op::kStzg:
    case Op::kStz2g:
    case Op::kStgp:
    case Op::kDcGva: return PortClass::kStore;
    default: return PortClass::kNone;
  }
}

void CoreProfile::validate() const {
  auto fail = [&](const std::string& why) {
    throw SimError(ErrorKind::kInvalidArgument, "profile '" + name + "': " + why);
  };
  if (issue_width == 0) fail("issue_width must be positive");
  if (rob_size == 0 || rob_size > Engine::kWindow) fail("rob_size out of range");
  if (lq_size == 0 || sb_size == 0) fail("queue sizes must be positive");
  if (load_units == 0 || store_units == 0) fail("port unit counts must be positive");
  for (std::uint32_t o : occupancy)
    if (o == 0) fail("occupancy must be positive");
  if (tag_check_slots == 0) fail("tag_check_slots must be at least 1");
  if (line_bytes != kLineBytes) fail("line_bytes must be 64");
  if (llc_ways == 0) fail("llc_ways must be positive");
  const std::uint64_t lines = llc_bytes / line_bytes;
  if (llc_bytes % line_bytes != 0 || !std::has_single_bit(lines)) fail("llc_bytes must be a power of two lines");
  if (lines % llc_ways != 0) fail("llc_ways must divide the line count");
  if (stlf_fail_prob < 0.0 || stlf_fail_prob > 1.0) fail("stlf_fail_prob must be in [0, 1]");
  if (hit_latency == 0 || miss_latency < hit_latency) fail("latencies must satisfy 0 < hit <= miss");
}

double CostReport::slowdown_vs(const CostReport& baseline) const {
  if (baseline.cycles == 0) return cycles == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  return static_cast<double>(cycles) / static_cast<double>(baseline.cycles);
}

CacheModel::CacheModel(std::uint64_t bytes, std::uint32_t ways, std::uint32_t line_bytes)
    : sets_(bytes / line_bytes / ways), ways_(ways), lines_(sets_ * ways) {}

const CacheModel::Line* CacheModel::find(Addr line) const {
  const Line* set = &lines_[set_of(line) * ways_];
  for (std::uint32_t w = 0; w < ways_; ++w)
    if (set[w].line == line) return &set[w];
  return nullptr;
}

CacheModel::Line& CacheModel::touch(Addr line) {
  Line& l = const_cast<Line&>(*find(line));
  l.stamp = ++clock_;
  return l;
}

CacheModel::Line& CacheModel::install(Addr line, Cycle data_ready, Cycle tag_ready, bool prefetched) {
  Line* set = &lines_[set_of(line) * ways_];
  Line* victim = &set[0];
  for (std::uint32_t w = 0; w < ways_; ++w) {
    if (set[w].line == kInvalid) {
      victim = &set[w];
      break;
    }
    if (set[w].stamp < victim->stamp) victim = &set[w];
  }
  *victim = Line{line, data_ready, tag_ready, ++clock_, prefetched};
  return *victim;
}

void CacheModel::flush() { std::fill(lines_.begin(), lines_.end(), Line{}); }

Engine::Engine(const CoreProfile& profile, TaggedMemory& mem, const CheckConfig& cfg, MteMode mode)
    : p_(profile),
      mem_(mem),
      cfg_(cfg),
      mode_(mode),
      exec_(mem, cfg, mode, /*record_events=*/false),
      cache_((p_.validate(), p_.llc_bytes), p_.llc_ways, p_.line_bytes),
      ready_(kWindow, 0),
      retire_(kWindow, 0),
      load_units_(p_.load_units, 0),
      store_units_(p_.store_units, 0) {}

bool Engine::tag_fill(bool mte_page) const {
  return mte_page && p_.storage == TagStorageScheme::kReservedRegion;
}

Engine::Access Engine::probe(Addr begin, Addr end, Cycle at, bool mte_page) const {
  Access a{at + p_.hit_latency, 0};
  Cycle chan = channel_free_;
  for (Addr l = line_of(begin); l <= line_of(end - 1); ++l) {
    if (const CacheModel::Line* line = cache_.find(l)) {
      a.data = std::max(a.data, line->data_ready);
      a.tag = std::max(a.tag, line->tag_ready);
      continue;
    }
    const Cycle start = std::max(at, chan);
    const Cycle data = start + p_.miss_latency;
    chan = start + p_.mem_interval;
    Cycle tag = data;
    if (tag_fill(mte_page)) {
      tag = data + p_.tag_fetch_latency;
      chan += p_.tag_fetch_interval;
    }
    a.data = std::max(a.data, data);
    a.tag = std::max(a.tag, tag);
  }
  return a;
}

void Engine::fill(Addr line, Cycle at, bool mte_page, bool prefetched, CacheModel::Line** out) {
  const Cycle start = std::max(at, channel_free_);
  const Cycle data = start + p_.miss_latency;
  channel_free_ = start + p_.mem_interval;
  Cycle tag = data;
  if (tag_fill(mte_page)) {
    tag = data + p_.tag_fetch_latency;
    channel_free_ += p_.tag_fetch_interval;
    ++counts_.extra_tag_transactions;
  }
  ++counts_.line_misses;
  CacheModel::Line& l = cache_.install(line, data, tag, prefetched);
  if (out != nullptr) *out = &l;
}

Engine::Access Engine::access(Addr begin, Addr end, Cycle at, bool mte_page, bool demand_load, bool allocate_only) {
  Access a{at + p_.hit_latency, 0};
  bool first = true;
  for (Addr l = line_of(begin); l <= line_of(end - 1); ++l) {
    CacheModel::Line* line = nullptr;
    bool miss = false;
    bool was_prefetched = false;
    if (cache_.find(l) != nullptr) {
      line = &cache_.touch(l);
      was_prefetched = line->prefetched;
      line->prefetched = false;
    } else if (allocate_only) {
      line = &cache_.install(l, at, at, false);
    } else {
      fill(l, at, mte_page, false, &line);
      miss = true;
    }
    a.data = std::max(a.data, line->data_ready);
    a.tag = std::max(a.tag, line->tag_ready);
    if (demand_load && first) train_prefetcher(l, miss, was_prefetched, at, mte_page);
    first = false;
  }
  return a;
}

void Engine::train_prefetcher(Addr line, bool demand_miss, bool was_prefetched, Cycle at, bool mte_page) {
  const Addr page = line * kLineBytes / kPageBytes;
  auto prefetch = [&](Addr target) {
    if (target * kLineBytes / kPageBytes != page) return false;
    if (cache_.find(target) == nullptr) fill(target, at, mte_page, true, nullptr);
    return true;
  };
  switch (p_.prefetch) {
    case PrefetchKind::kNone: return;
    case PrefetchKind::kNextLine:
      if (!demand_miss && !was_prefetched) return;
      for (std::uint32_t k = 1; k <= p_.prefetch_degree; ++k)
        if (!prefetch(line + k)) break;
      return;
    case PrefetchKind::kStride: {
      if (stride_last_ == CacheModel::kInvalid) {
        stride_last_ = line;
        return;
      }
      const std::int64_t delta = static_cast<std::int64_t>(line - stride_last_);
      if (delta == 0) return;
      if (delta == stride_delta_ && delta >= -2 && delta <= 2) {
        for (std::uint32_t k = 1; k <= p_.prefetch_degree; ++k)
          if (!prefetch(line + static_cast<Addr>(delta * static_cast<std::int64_t>(k)))) break;
      }
      stride_delta_ = delta;
      stride_last_ = line;
      return;
    }
  }
}

const Engine::SbEntry* Engine::forward_source(Addr begin, Addr end, Cycle at) const {
  for (auto it = sb_.rbegin(); it != sb_.rend(); ++it) {
    if (!it->data || it->end <= begin || it->begin >= end) continue;
    // Drains are in order, so an older overlapping store is never younger in time.
    return it->drain > at ? &*it : nullptr;
  }
  return nullptr;
}

bool Engine::forward_fails(std::size_t index) const {
  const std::uint64_t h = splitmix64(p_.seed ^ splitmix64(index));
  return static_cast<double>(h >> 11) * 0x1.0p-53 < p_.stlf_fail_prob;
}

bool Engine::issue(const Instruction& instr) {
  if (halted_) return false;
  const std::size_t i = index_;
  const Op op = instr.op;

  Cycle deps_ready = 0;
  for (std::uint32_t d : instr.deps()) {
    if (d >= i || i - d >= kWindow) {
      throw SimError(ErrorKind::kInvalidArgument,
                     "dependency " + std::to_string(d) + " of instruction " + std::to_string(i) + " out of window");
    }
    deps_ready = std::max(deps_ready, ready_at(d));
  }

  const StepInfo info = exec_.step(instr, i);
  ++index_;
  ++counts_.instructions;
  if (info.halted) {
    halted_ = true;
    return false;
  }

  const bool costed = is_data_access(op) && info.check.performed(p_.fault_behavior());
  const bool sync = costed && info.sync_check;
  if (costed) ++counts_.tag_checks;

  const Addr begin = instr.begin();
  const Addr end = begin + std::max<std::uint64_t>(instr.length(), 1);
  const bool sb_op = uses_store_buffer(op);
  const bool lq_op = uses_load_queue(op);
  const PortClass pc = port_class(op);
  std::vector<Cycle>* units = pc == PortClass::kLoad ? &load_units_ : pc == PortClass::kStore ? &store_units_ : nullptr;

  // Load forwarding is fixed by which older store overlaps; only whether it
  // is still buffered depends on the dispatch cycle.
  const bool fwd_fail_draw = op == Op::kLoad && forward_fails(i);
  const bool fwd_allowed =
      p_.stlf_enabled && (p_.stlf_tag_aware || !info.mte_page || !costed || !fwd_fail_draw);

  struct Plan {
    Cycle exec = 0;
    Cycle access_at = 0;
    const SbEntry* fwd = nullptr;
    bool forwarded = false;
    bool need_slot = false;
    Cycle release = 0;
    Cycle flip = kNever;
  };
  auto plan_at = [&](Cycle t) {
    Plan pl;
    pl.exec = std::max(t, deps_ready);
    if (sb_op) pl.exec = std::max(pl.exec, fence_);
    pl.access_at = pl.exec;
    if (op == Op::kLoad) {
      pl.fwd = forward_source(begin, end, pl.exec);
      if (pl.fwd != nullptr) {
        const bool covers = pl.fwd->begin <= begin && pl.fwd->end >= end;
        if (covers && fwd_allowed) {
          pl.forwarded = true;
          return pl;
        }
        pl.access_at = std::max(pl.exec, pl.fwd->drain);
      }
    }
    if (!costed) return pl;
    const Access a = probe(begin, end, pl.access_at, info.mte_page);
    pl.release = std::max(a.tag, pl.access_at + p_.tag_check_hold);
    pl.need_slot = pl.release > pl.access_at;
    if (pl.need_slot && p_.tag_check_hold == 0) {
      bool all_present = true;
      for (Addr l = line_of(begin); l <= line_of(end - 1); ++l) all_present &= cache_.find(l) != nullptr;
      if (all_present) pl.flip = a.tag;
    }
    return pl;
  };

  // Earliest dispatch cycle satisfying every capacity constraint.
  Cycle t = std::max(floor_, last_dispatch_);
  bool slot_stalled = false;
  Plan plan;
  for (;;) {
    if (t == last_dispatch_ && dispatched_in_cycle_ >= p_.issue_width) {
      ++t;
      continue;
    }
    if (i >= p_.rob_size) {
      const Cycle r = retire_[(i - p_.rob_size) % kWindow];
      if (r > t) {
        t = r;
        continue;
      }
    }
    if (units != nullptr) {
      const Cycle free = *std::min_element(units->begin(), units->end());
      if (free > t) {
        t = free;
        continue;
      }
    }
    if (lq_op) {
      while (!lq_.empty() && lq_.front() <= t) lq_.pop_front();
      if (lq_.size() >= p_.lq_size) {
        t = lq_[lq_.size() - p_.lq_size];
        continue;
      }
    }
    if (sb_op) {
      while (!sb_.empty() && sb_.front().drain <= t) sb_.pop_front();
      if (sb_.size() >= p_.sb_size) {
        t = sb_[sb_.size() - p_.sb_size].drain;
        continue;
      }
    }
    plan = plan_at(t);
    if (plan.need_slot) {
      while (!slots_.empty() && slots_.top() <= t) slots_.pop();
      if (slots_.size() >= p_.tag_check_slots) {
        slot_stalled = true;
        t = std::min(slots_.top(), plan.flip);
        continue;
      }
    }
    break;
  }
  const Cycle d = t;
  if (slot_stalled) ++counts_.slot_stalls;

  if (d == last_dispatch_) {
    ++dispatched_in_cycle_;
  } else {
    last_dispatch_ = d;
    dispatched_in_cycle_ = 1;
  }
  if (units != nullptr) *std::min_element(units->begin(), units->end()) = d + p_.op_occupancy(op);

  const Cycle e = plan.exec;
  Cycle complete = e + 1;
  Cycle drain = 0;
  switch (op) {
    case Op::kLoad: {
      if (plan.forwarded) {
        ++counts_.stlf_hits;
        complete = std::max(e, plan.fwd->exec) + p_.stlf_latency;
        break;
      }
      if (plan.fwd != nullptr) ++counts_.stlf_misses;
      const Access a = access(begin, end, plan.access_at, info.mte_page, /*demand_load=*/true, false);
      complete = a.data;
      if (sync) {
        if (a.tag > a.data) ++counts_.tag_check_stalls;
        complete = std::max(a.data, a.tag) + p_.sync_load_latency;
      }
      break;
    }
    case Op::kLdg: {
      const Access a = access(begin, end, e, info.mte_page, false, false);
      complete = std::max(e + p_.hit_latency, a.tag);
      break;
    }
    case Op::kStore:
    case Op::kStg:
    case Op::kSt2g:
    case Op::kStzg:
    case Op::kStz2g:
    case Op::kStgp:
    case Op::kDcGva: {
      if (fence_from_mte_ && fence_ > std::max(d, deps_ready)) ++counts_.tag_check_stalls;
      const Access a = access(begin, end, e, info.mte_page, false, op == Op::kDcGva);
      drain = std::max({e + p_.store_drain_latency, a.data, last_drain_});
      if (sync) drain = std::max(drain, a.tag);
      if (sync && p_.serialized_mte_stores) {
        const Cycle f = std::max(e, a.tag) + p_.store_tagcheck_roundtrip;
        if (f >= fence_) {
          fence_ = f;
          fence_from_mte_ = true;
        }
      }
      break;
    }
    case Op::kDmbSt:
      if (last_drain_ > fence_) {
        fence_ = last_drain_;
        fence_from_mte_ = false;
      }
      break;
    default: break;
  }

  const Cycle retire = std::max(last_retire_, complete);
  if (sb_op) {
    drain = std::max(drain, retire);
    sb_.push_back(SbEntry{begin, end, e, drain, writes_data(op)});
    last_drain_ = drain;
  }
  if (lq_op) lq_.push_back(retire);
  if (plan.need_slot) slots_.push(plan.release);
  ready_at(i) = complete;
  retire_[i % kWindow] = retire;
  last_retire_ = retire;
  end_ = std::max({end_, retire, drain});
  return true;
}

void Engine::flush_cache() {
  cache_.flush();
  stride_last_ = CacheModel::kInvalid;
  stride_delta_ = 0;
}

void Engine::begin_measurement() {
  const Cycle t0 = std::max({end_, last_dispatch_, fence_, floor_});
  floor_ = t0;
  base_ = t0;
  end_ = t0;
  counts_ = CostCounters{};
  fault_base_ = exec_.faults().size() + exec_.pending_faults();
}

CostReport Engine::report() const {
  CostReport r;
  r.cycles = end_ - base_;
  r.counts = counts_;
  r.counts.faults = exec_.faults().size() + exec_.pending_faults() - fault_base_;
  return r;
}

CostReport simulate(const Program& program, const TaggedMemory& mem, const CoreProfile& profile,
                    const CheckConfig& cfg, MteMode mode) {
  validate(program);
  TaggedMemory local = mem;
  Engine engine(profile, local, cfg, mode);
  for (const Instruction& in : program)
    if (!engine.issue(in)) break;
  return engine.report();
}

double instruction_throughput(const CoreProfile& profile, Op op, MteMode mode, bool page_tagged) {
  constexpr Addr kBase = 0x100000;
  constexpr Addr kSpan = 0x1000;
  constexpr std::size_t kWarm = 2048;
  constexpr std::size_t kMeasured = 8192;
  const bool taggable = page_tagged || is_tag_op(op);
  const Tag tag(taggable ? 3 : 0);

  TaggedMemory mem;
  mem.map(kBase, kSpan, PageAttrs{taggable, false});
  if (taggable)
    for (Addr g = kBase; g < kBase + kSpan; g += kGranuleBytes) mem.set_tag(Granule{g}, tag);

  const std::uint64_t step = is_tag_op(op) ? tag_op_span(op) : 8;
  auto make = [&](std::size_t k) {
    const TaggedAddress a = make_tagged(kBase + (k * step) % kSpan, tag);
    if (op == Op::kLoad) return make_load(a, 8);
    if (op == Op::kStore) return make_store(a, 8, k);
    if (is_tag_op(op)) return make_tag_op(op, a);
    return make_plain(op);
  };

  Engine engine(profile, mem, CheckConfig{}, mode);
  std::size_t k = 0;
  for (; k < kWarm; ++k) engine.issue(make(k));
  engine.begin_measurement();
  for (; k < kWarm + kMeasured; ++k) engine.issue(make(k));
  const CostReport r = engine.report();
  return r.cycles == 0 ? 0.0 : static_cast<double>(kMeasured) / static_cast<double>(r.cycles);
}

}  // namespace mtesim
