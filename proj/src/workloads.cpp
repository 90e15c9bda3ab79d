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

#include "mtesim/workloads.hpp"

#include <algorithm>
#include <charconv>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

namespace mtesim {

namespace {

constexpr std::uint32_t kNone = ~std::uint32_t{0};

// Numbers the instructions of one phase.
class Emitter {
 public:
  explicit Emitter(const InstrSink& sink) : sink_(sink) {}

  std::uint32_t push(const Instruction& in) {
    sink_(in);
    return n_++;
  }
  // Nop depending on the listed instructions (kNone entries are skipped).
  std::uint32_t nop(std::initializer_list<std::uint32_t> deps) {
    Instruction in = make_plain(Op::kNop);
    for (std::uint32_t d : deps)
      if (d != kNone) in.depends_on(d);
    return push(in);
  }

 private:
  const InstrSink& sink_;
  std::uint32_t n_ = 0;
};

Instruction after(Instruction in, std::initializer_list<std::uint32_t> deps) {
  for (std::uint32_t d : deps)
    if (d != kNone) in.depends_on(d);
  return in;
}

void tag_range(TaggedMemory& mem, Addr base, std::uint64_t len, Tag tag) {
  for (Addr g = base; g < base + len; g += kGranuleBytes) mem.set_tag(Granule{g}, tag);
}

void fill_random(TaggedMemory& mem, Addr base, std::uint64_t len, std::mt19937_64& rng) {
  std::vector<std::uint8_t> bytes(len);
  for (std::size_t i = 0; i < len; i += 8) {
    const std::uint64_t v = rng();
    for (std::size_t b = 0; b < 8 && i + b < len; ++b) bytes[i + b] = static_cast<std::uint8_t>(v >> (8 * b));
  }
  mem.write(base, bytes);
}

void check_budget(std::uint64_t bytes, const char* what) {
  if (bytes > kSimMemoryBudget) {
    throw SimError(ErrorKind::kOutOfSimMemory,
                   std::string(what) + " needs " + std::to_string(bytes) + " bytes, over the simulation budget");
  }
}

void require(bool ok, const std::string& why) {
  if (!ok) throw SimError(ErrorKind::kInvalidArgument, why);
}

}  // namespace

Program materialize(const Workload& w) {
  Program out;
  for (const Phase& ph : w.phases) {
    const std::uint32_t base = static_cast<std::uint32_t>(out.size());
    ph.emit([&](const Instruction& in) {
      Instruction x = in;
      for (std::uint8_t k = 0; k < x.ndeps; ++k) x.dep_slots[k] += base;
      out.push_back(x);
    });
  }
  return out;
}

CostReport run_workload(const Workload& w, const CoreProfile& profile, MteMode mode) {
  TaggedMemory mem = w.memory;
  Engine engine(profile, mem, w.cfg, mode);
  bool halted = false;
  for (const Phase& ph : w.phases) {
    if (halted) break;
    if (ph.flush_before) engine.flush_cache();
    if (ph.measured) engine.begin_measurement();
    const std::size_t base = engine.issued();
    ph.emit([&](const Instruction& in) {
      if (halted) return;
      Instruction x = in;
      for (std::uint8_t k = 0; k < x.ndeps; ++k) x.dep_slots[k] += static_cast<std::uint32_t>(base);
      halted = !engine.issue(x);
    });
  }
  return engine.report();
}

// ---------------------------------------------------------------------------
// Linked-list stride benchmark.

void LLBenchParams::validate() const {
  require(L > 0, "llbench: L must be positive");
  require(A > 0 && A % kGranuleBytes == 0, "llbench: A must be a positive multiple of 16");
  require(S > 0 && S <= A, "llbench: S must be in [1, A]");
}

Workload gen_llbench(const LLBenchParams& p) {
  p.validate();
  constexpr Addr kHeap = 0x10000000;
  const std::uint64_t nodes_bytes = align_up(p.L * kGranuleBytes, kPageBytes);
  const std::uint64_t capacity = nodes_bytes + p.L * p.A + kPageBytes;
  check_budget(capacity, "llbench");

  Workload w;
  w.name = "llbench";
  std::ostringstream desc;
  desc << "L=" << p.L << ";A=" << p.A << ";S=" << p.S << ";seed=" << p.seed << ";shuffle=" << p.shuffle;
  w.params = desc.str();

  struct State {
    std::vector<TaggedAddress> node;
    std::vector<TaggedAddress> array;
  };
  auto st = std::make_shared<State>();
  st->node.resize(p.L);
  st->array.resize(p.L);

  TaggedHeap heap(w.memory, kHeap, capacity, AllocPolicy{p.seed, std::nullopt, false, false});
  for (std::uint64_t k = 0; k < p.L; ++k) st->node[k] = heap.malloc(kGranuleBytes);
  for (std::uint64_t k = 0; k < p.L; ++k) st->array[k] = heap.malloc(p.A);

  std::mt19937_64 rng(p.seed);
  if (p.shuffle) {
    std::vector<std::size_t> perm(p.L);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    State s2;
    for (std::size_t j = 0; j < p.L; ++j) {
      s2.node.push_back(st->node[perm[j]]);
      s2.array.push_back(st->array[perm[j]]);
    }
    *st = std::move(s2);
  }
  for (std::uint64_t k = 0; k < p.L; ++k) {
    const Addr n = st->node[k].untagged();
    w.memory.write_u64(n, k + 1 < p.L ? st->node[k + 1].raw() : 0);
    w.memory.write_u64(n + 8, st->array[k].raw());
    fill_random(w.memory, st->array[k].untagged(), p.A, rng);
  }

  const std::uint64_t A = p.A;
  const std::uint64_t S = p.S;
  auto traverse = [st, A, S](const InstrSink& sink) {
    Emitter e(sink);
    std::uint32_t prev = kNone;
    for (std::size_t j = 0; j < st->node.size(); ++j) {
      const std::uint32_t head = e.push(after(make_load(st->node[j], 16), {prev}));
      std::uint32_t sum = kNone;
      for (std::uint64_t i = 1; i < A; i += S) {
        const std::uint32_t ld = e.push(after(make_load(st->array[j].offset(static_cast<std::int64_t>(i)), 1), {head}));
        sum = e.nop({ld, sum});
      }
      e.nop({head});
      prev = head;
    }
  };
  w.phases.push_back(Phase{"warmup", true, false, traverse});
  w.phases.push_back(Phase{"traversal", false, true, traverse});
  return w;
}

LLBenchResult run_llbench(const LLBenchParams& p, const CoreProfile& profile, MteMode mode) {
  const Workload w = gen_llbench(p);
  return LLBenchResult{run_workload(w, profile, mode), run_workload(w, profile, MteMode::kOff)};
}

// ---------------------------------------------------------------------------
// Store-tight loop.

Workload gen_store_loop(std::uint64_t iters, bool tagged, bool barrier) {
  require(iters > 0, "store_loop: iters must be positive");
  constexpr Addr kPage = 0x10000;
  constexpr Addr kTarget = kPage + 0x40;
  const Tag tag(tagged ? 5 : 0);

  Workload w;
  w.name = barrier ? "store_loop_barrier" : "store_loop";
  w.params = "iters=" + std::to_string(iters) + ";tagged=" + std::to_string(tagged) +
             ";barrier=" + std::to_string(barrier);
  w.memory.map(kPage, kPageBytes, PageAttrs{tagged, false});
  if (tagged) tag_range(w.memory, kTarget, kGranuleBytes, tag);

  auto loop = [=](std::uint64_t n) {
    return [=](const InstrSink& sink) {
      Emitter e(sink);
      std::uint32_t counter = kNone;
      for (std::uint64_t k = 0; k < n; ++k) {
        e.push(make_store(make_tagged(kTarget, tag), 8, k));
        if (barrier) e.push(make_plain(Op::kDmbSt));
        counter = e.nop({counter});
        const std::uint32_t cmp = e.nop({counter});
        e.nop({cmp});
      }
    };
  };
  w.phases.push_back(Phase{"warmup", false, false, loop(64)});
  w.phases.push_back(Phase{"loop", false, true, loop(iters)});
  return w;
}

// ---------------------------------------------------------------------------
// RAR / WAW / RAW chains.

std::string_view to_string(ChainKind k) {
  switch (k) {
    case ChainKind::kRar: return "rar";
    case ChainKind::kWaw: return "waw";
    case ChainKind::kRaw: return "raw";
  }
  return "?";
}

ChainKind parse_chain_kind(std::string_view s) {
  if (s == "rar" || s == "RAR") return ChainKind::kRar;
  if (s == "waw" || s == "WAW") return ChainKind::kWaw;
  if (s == "raw" || s == "RAW") return ChainKind::kRaw;
  throw SimError(ErrorKind::kParse, "unknown chain kind '" + std::string(s) + "'");
}

Workload gen_memchain(const MemChainParams& p) {
  require(p.buffer_bytes >= 16 && p.buffer_bytes % 16 == 0, "memchain: buffer_bytes must be a multiple of 16");
  require(p.iters > 0, "memchain: iters must be positive");
  constexpr Addr kBuf = 0x40000000;
  constexpr Addr kIdx = 0x80000000;
  const Tag tag(7);
  const std::uint64_t len = p.buffer_bytes / 8;
  const std::uint64_t iters = std::min(p.iters, len);
  check_budget(p.buffer_bytes + (iters + 1) * 8, "memchain");

  Workload w;
  w.name = "memchain";
  w.params = "kind=" + std::string(to_string(p.kind)) + ";buffer_bytes=" + std::to_string(p.buffer_bytes) +
             ";iters=" + std::to_string(iters) + ";seed=" + std::to_string(p.seed);
  w.memory.map(kBuf, p.buffer_bytes, PageAttrs{true, false});
  w.memory.map(kIdx, (iters + 1) * 8, PageAttrs{false, false});
  tag_range(w.memory, kBuf, p.buffer_bytes, tag);

  std::mt19937_64 rng(p.seed);
  auto elem = [&](std::uint64_t i) { return make_tagged(kBuf + 8 * i, tag); };

  // Pointer-chasing cycle through every element.
  std::vector<std::uint64_t> order(len);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::uint64_t k = 0; k < len; ++k) w.memory.write_u64(kBuf + 8 * order[k], elem(order[(k + 1) % len]).raw());

  auto idx = std::make_shared<std::vector<std::uint64_t>>(iters + 1);
  std::uniform_int_distribution<std::uint64_t> pick(0, len - 1);
  for (std::uint64_t i = 0; i <= iters; ++i) {
    (*idx)[i] = pick(rng);
    w.memory.write_u64(kIdx + 8 * i, (*idx)[i]);
  }

  std::function<void(const InstrSink&)> body;
  switch (p.kind) {
    case ChainKind::kRar: {
      auto chain = std::make_shared<std::vector<std::uint64_t>>(order.begin(), order.begin() + iters);
      body = [chain, tag](const InstrSink& sink) {
        Emitter e(sink);
        std::uint32_t prev = kNone;
        for (std::uint64_t at : *chain) {
          prev = e.push(after(make_load(make_tagged(kBuf + 8 * at, tag), 8), {prev}));
          e.nop({prev});
        }
      };
      break;
    }
    case ChainKind::kWaw:
      body = [idx, iters, tag](const InstrSink& sink) {
        Emitter e(sink);
        std::uint32_t counter = kNone;
        for (std::uint64_t i = 0; i < iters; ++i) {
          const std::uint32_t a = e.push(make_load(make_tagged(kIdx + 8 * i, Tag(0)), 8));
          e.push(after(make_store(make_tagged(kBuf + 8 * (*idx)[i], tag), 8, i), {a}));
          counter = e.nop({counter});
        }
      };
      break;
    case ChainKind::kRaw:
      body = [idx, iters, tag](const InstrSink& sink) {
        Emitter e(sink);
        std::uint32_t counter = kNone;
        std::uint32_t cur = e.push(make_load(make_tagged(kIdx, Tag(0)), 8));
        for (std::uint64_t i = 0; i < iters; ++i) {
          const std::uint32_t next = e.push(make_load(make_tagged(kIdx + 8 * (i + 1), Tag(0)), 8));
          const std::uint32_t v = e.push(after(make_load(make_tagged(kBuf + 8 * (*idx)[i], tag), 8), {cur}));
          e.push(after(make_store(make_tagged(kBuf + 8 * (*idx)[i + 1], tag), 8, i), {v, next}));
          counter = e.nop({counter});
          cur = next;
        }
      };
      break;
  }
  w.phases.push_back(Phase{"chain", true, true, std::move(body)});
  return w;
}

// ---------------------------------------------------------------------------
// BufLock scenario.

std::string_view to_string(Protection p) {
  switch (p) {
    case Protection::kInsecure: return "insecure";
    case Protection::kCopy: return "copy";
    case Protection::kBufLock: return "buflock";
  }
  return "?";
}

Protection parse_protection(std::string_view s) {
  if (s == "insecure") return Protection::kInsecure;
  if (s == "copy") return Protection::kCopy;
  if (s == "buflock") return Protection::kBufLock;
  throw SimError(ErrorKind::kParse, "unknown protection '" + std::string(s) + "'");
}

Workload gen_buflock(const BufLockScenario& s) {
  require(s.buffer_bytes > 0 && s.buffer_bytes % kGranuleBytes == 0,
          "buflock: buffer_bytes must be a positive multiple of 16");
  require(s.rounds > 0, "buflock: rounds must be positive");
  constexpr Addr kSandbox = 0x20000000;
  constexpr Addr kCopy = 0x30000000;
  const Tag lock(0xA);
  const std::uint64_t region = align_up(s.buffer_bytes, kPageBytes);
  check_budget(2 * region * s.rounds, "buflock");

  Workload w;
  w.name = "buflock";
  w.params = "buffer_bytes=" + std::to_string(s.buffer_bytes) + ";rounds=" + std::to_string(s.rounds) +
             ";protection=" + std::string(to_string(s.protection));
  // Only BufLock maps the sandbox heap with tagging enabled.
  w.memory.map(kSandbox, region * s.rounds, PageAttrs{s.protection == Protection::kBufLock, false});
  if (s.protection == Protection::kCopy) w.memory.map(kCopy, region * s.rounds, PageAttrs{false, false});

  const BufLockScenario sc = s;
  auto body = [sc, region, lock](const InstrSink& sink) {
    Emitter e(sink);
    std::uint32_t counter = kNone;
    for (std::uint64_t r = 0; r < sc.rounds; ++r) {
      const Addr out = kSandbox + r * region;
      // The sandboxed parser produces its output with untagged pointers.
      for (std::uint64_t off = 0; off < sc.buffer_bytes; off += 8) {
        e.push(make_store(make_tagged(out + off, Tag(0)), 8, off));
        if (off % 16 == 8) counter = e.nop({counter});
      }
      TaggedAddress src = make_tagged(out, Tag(0));
      switch (sc.protection) {
        case Protection::kInsecure: break;
        case Protection::kCopy: {
          const Addr dst = kCopy + r * region;
          for (std::uint64_t off = 0; off < sc.buffer_bytes; ++off) {
            const std::uint32_t ld = e.push(make_load(make_tagged(out + off, Tag(0)), 1));
            e.push(after(make_store(make_tagged(dst + off, Tag(0)), 1), {ld}));
            if (off % 8 == 7) counter = e.nop({counter});
          }
          src = make_tagged(dst, Tag(0));
          break;
        }
        case Protection::kBufLock:
          for (const Instruction& op : bulk_tag(out, sc.buffer_bytes, lock, BulkTagStrategy::kMixedWidth)) e.push(op);
          src = make_tagged(out, lock);
          break;
      }
      // Trusted consumer.
      std::uint32_t sum = kNone;
      for (std::uint64_t off = 0; off < sc.buffer_bytes; off += 16) {
        const std::uint32_t ld = e.push(make_load(src.offset(static_cast<std::int64_t>(off)), 16));
        sum = e.nop({ld, sum});
      }
    }
  };
  // The sandbox heap and the copy buffers are already in use, hence cached.
  const bool copy = s.protection == Protection::kCopy;
  auto warm = [region, rounds = s.rounds, copy](const InstrSink& sink) {
    Emitter e(sink);
    for (Addr a = 0; a < region * rounds; a += kLineBytes) {
      e.push(make_load(make_tagged(kSandbox + a, Tag(0)), 8));
      if (copy) e.push(make_load(make_tagged(kCopy + a, Tag(0)), 8));
    }
  };
  w.phases.push_back(Phase{"warm", true, false, warm});
  w.phases.push_back(Phase{"rounds", false, true, body});
  return w;
}

// ---------------------------------------------------------------------------
// Tag-vs-copy.

Workload gen_tag_buffer(const TagBufferParams& p) {
  require(p.bytes > 0 && p.bytes % kGranuleBytes == 0, "tag_buffer: bytes must be a positive multiple of 16");
  require(p.reps > 0, "tag_buffer: reps must be positive");
  constexpr Addr kBuf = 0x60000000;
  constexpr Addr kDst = 0x68000000;
  check_budget(2 * p.bytes, "tag_buffer");

  Workload w;
  w.name = "tag_buffer";
  w.params = "bytes=" + std::to_string(p.bytes) + ";reps=" + std::to_string(p.reps) +
             ";mode=" + (p.copy ? std::string("memcpy") : std::string(to_string(p.strategy)));
  w.memory.map(kBuf, p.bytes, PageAttrs{true, false});
  if (p.copy) w.memory.map(kDst, p.bytes, PageAttrs{true, false});
  if (!p.copy && p.strategy == BulkTagStrategy::kLinewiseDcGva) {
    require(p.bytes % kLineBytes == 0, "tag_buffer: linewise_dcgva needs a whole number of lines");
  }

  for (std::uint64_t r = 0; r < p.reps; ++r) {
    const Tag t(1 + r % 15);
    auto body = [p, t](const InstrSink& sink) {
      Emitter e(sink);
      if (p.copy) {
        for (std::uint64_t off = 0; off < p.bytes; off += 16) {
          const std::uint32_t ld = e.push(make_load(make_tagged(kBuf + off, Tag(0)), 16));
          e.push(after(make_store(make_tagged(kDst + off, Tag(0)), 16), {ld}));
        }
        return;
      }
      for (const Instruction& op : bulk_tag(kBuf, p.bytes, t, p.strategy)) e.push(op);
    };
    w.phases.push_back(Phase{"rep" + std::to_string(r), true, r == 0, body});
  }
  return w;
}

// ---------------------------------------------------------------------------
// Mixed user/kernel accesses.

Workload gen_kernel_mix(const KernelMixParams& p) {
  require(p.rounds > 0, "kernel_mix: rounds must be positive");
  require(p.kernel_bytes % (16 * p.rounds) == 0, "kernel_mix: kernel_bytes must split into 16-byte rounds");
  require(p.user_bytes >= 4096 && p.user_bytes % 16 == 0, "kernel_mix: user_bytes must be >= 4096");
  constexpr Addr kUser = 0x50000000;
  constexpr Addr kKernel = 0x70000000;
  check_budget(p.kernel_bytes + p.user_bytes, "kernel_mix");

  Workload w;
  w.name = "kernel_mix";
  w.params = "kernel_bytes=" + std::to_string(p.kernel_bytes) + ";user_bytes=" + std::to_string(p.user_bytes) +
             ";rounds=" + std::to_string(p.rounds);
  w.memory.map(kUser, p.user_bytes, PageAttrs{false, false});
  w.memory.map(kKernel, p.kernel_bytes, PageAttrs{true, true});
  w.cfg.tcf = false;

  auto body = [p](const InstrSink& sink) {
    Emitter e(sink);
    const std::uint64_t chunk = p.kernel_bytes / p.rounds;
    std::uint64_t user_off = 0;
    for (std::uint64_t r = 0; r < p.rounds; ++r) {
      // User-side work on the (untagged) user buffer.
      std::uint32_t sum = kNone;
      for (int k = 0; k < 64; ++k) {
        const std::uint32_t ld = e.push(make_load(make_tagged(kUser + user_off, Tag(0)), 16));
        sum = e.nop({ld, sum});
        user_off = (user_off + 16) % p.user_bytes;
      }
      e.push(make_plain(Op::kSyscall));
      // Kernel copy-out into the user buffer.
      for (std::uint64_t off = 0; off < chunk; off += 16) {
        Instruction ld = make_load(make_tagged(kKernel + r * chunk + off, Tag(0)), 16);
        ld.kernel = true;
        const std::uint32_t li = e.push(ld);
        Instruction st = after(make_store(make_tagged(kUser + (r * chunk + off) % p.user_bytes, Tag(0)), 16), {li});
        st.kernel = true;
        e.push(st);
      }
      e.push(make_plain(Op::kSyscall));
    }
  };
  w.phases.push_back(Phase{"mix", true, true, body});
  return w;
}

// ---------------------------------------------------------------------------
// Cache-resident stream.

Workload gen_stream(const StreamParams& p) {
  require(p.bytes >= 64 && p.bytes % 64 == 0, "stream: bytes must be a positive multiple of 64");
  require(p.passes > 0, "stream: passes must be positive");
  constexpr Addr kBuf = 0x90000000;
  const Tag tag(9);
  check_budget(p.bytes, "stream");

  Workload w;
  w.name = "stream";
  w.params = "bytes=" + std::to_string(p.bytes) + ";passes=" + std::to_string(p.passes);
  w.memory.map(kBuf, p.bytes, PageAttrs{true, false});
  tag_range(w.memory, kBuf, p.bytes, tag);

  auto passes = [bytes = p.bytes, tag](std::uint64_t n) {
    return [=](const InstrSink& sink) {
      Emitter e(sink);
      std::array<std::uint32_t, 4> acc{kNone, kNone, kNone, kNone};
      std::size_t k = 0;
      for (std::uint64_t pass = 0; pass < n; ++pass) {
        for (std::uint64_t off = 0; off < bytes; off += 16, ++k) {
          const std::uint32_t ld = e.push(make_load(make_tagged(kBuf + off, tag), 16));
          acc[k % 4] = e.nop({ld, acc[k % 4]});
        }
      }
    };
  };
  w.phases.push_back(Phase{"warmup", true, false, passes(1)});
  w.phases.push_back(Phase{"passes", false, true, passes(p.passes)});
  return w;
}

// ---------------------------------------------------------------------------
// Sparse scan for the tracers.

SparseScan gen_sparse_scan(const SparseScanParams& p) {
  require(p.traced_bytes > 0 && p.traced_bytes % kGranuleBytes == 0,
          "sparse_scan: traced_bytes must be a positive multiple of 16");
  require(p.total_bytes % 8 == 0 && p.total_bytes >= p.traced_bytes, "sparse_scan: total_bytes too small");
  constexpr Addr kTraced = 0xA0000000;
  constexpr Addr kPlain = 0xB0000000;
  const std::uint64_t untraced = p.total_bytes - p.traced_bytes;
  check_budget(p.total_bytes + kPageBytes, "sparse_scan");

  SparseScan s;
  s.memory.map(kTraced, p.traced_bytes, PageAttrs{true, false});
  if (untraced > 0) s.memory.map(kPlain, untraced, PageAttrs{false, false});
  s.traced = granules_for_range(kTraced, p.traced_bytes);

  const std::uint64_t total = p.total_bytes / 8;
  const std::uint64_t traced = p.traced_bytes / 8;
  std::uint64_t t = 0;
  std::uint64_t u = 0;
  std::uint32_t sum = kNone;
  for (std::uint64_t k = 0; k < total; ++k) {
    // Traced accesses are spread evenly through the scan.
    const bool pick_traced = t < traced && (k + 1) * traced >= (t + 1) * total;
    const Addr a = pick_traced ? kTraced + 8 * t++ : kPlain + 8 * u++;
    const std::uint32_t ld = static_cast<std::uint32_t>(s.program.size());
    s.program.push_back(make_load(make_tagged(a, Tag(0)), 8));
    Instruction add = make_plain(Op::kNop);
    add.depends_on(ld);
    if (sum != kNone) add.depends_on(sum);
    sum = static_cast<std::uint32_t>(s.program.size());
    s.program.push_back(add);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Registry.

namespace {

std::uint64_t parse_size(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr == first) {
    throw SimError(ErrorKind::kInvalidArgument, "parameter --" + key + ": bad number '" + text + "'");
  }
  std::string_view suffix(ptr, static_cast<std::size_t>(last - ptr));
  if (suffix == "K" || suffix == "KiB") v <<= 10;
  else if (suffix == "M" || suffix == "MiB") v <<= 20;
  else if (suffix == "G" || suffix == "GiB") v <<= 30;
  else if (!suffix.empty())
    throw SimError(ErrorKind::kInvalidArgument, "parameter --" + key + ": bad suffix in '" + text + "'");
  return v;
}

}  // namespace

std::uint64_t WorkloadParams::u64(const std::string& key, std::uint64_t def) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? def : parse_size(key, it->second);
}

bool WorkloadParams::flag(const std::string& key, bool def) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  const std::string& v = it->second;
  if (v == "1" || v == "true" || v == "yes" || v.empty()) return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw SimError(ErrorKind::kInvalidArgument, "parameter --" + key + ": expected a boolean, got '" + v + "'");
}

std::string WorkloadParams::str(const std::string& key, std::string def) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? def : it->second;
}

void WorkloadParams::expect_only(std::initializer_list<std::string_view> known) const {
  for (const auto& [k, v] : kv_) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      throw SimError(ErrorKind::kInvalidArgument, "unknown workload parameter --" + k);
    }
  }
}

const std::vector<WorkloadInfo>& workload_catalog() {
  static const std::vector<WorkloadInfo> kCatalog = {
      {"llbench", "linked-list traversal summing every S-th array byte", "L A S seed shuffle"},
      {"store_loop", "stores to one fixed address", "iters tagged barrier"},
      {"memchain", "pointer chase (rar), random stores (waw) or load-store chain (raw)",
       "kind buffer_bytes iters seed"},
      {"buflock", "sandboxed producer and trusted consumer", "buffer_bytes rounds protection"},
      {"tag_buffer", "tag or copy one buffer from a cold cache", "bytes reps strategy copy"},
      {"kernel_mix", "user work with kernel copy-out", "kernel_bytes user_bytes rounds"},
      {"stream", "cache-resident array reduction", "bytes passes"},
      {"sparse_scan", "linear scan touching a small traced buffer", "total_bytes traced_bytes"},
  };
  return kCatalog;
}

Workload make_workload(std::string_view name, const WorkloadParams& q) {
  if (name == "llbench") {
    q.expect_only({"L", "A", "S", "seed", "shuffle"});
    LLBenchParams p;
    p.L = q.u64("L", p.L);
    p.A = q.u64("A", p.A);
    p.S = q.u64("S", p.S);
    p.seed = q.u64("seed", p.seed);
    p.shuffle = q.flag("shuffle", p.shuffle);
    return gen_llbench(p);
  }
  if (name == "store_loop") {
    q.expect_only({"iters", "tagged", "barrier"});
    return gen_store_loop(q.u64("iters", 10000), q.flag("tagged", true), q.flag("barrier", false));
  }
  if (name == "memchain") {
    q.expect_only({"kind", "buffer_bytes", "iters", "seed"});
    MemChainParams p;
    p.kind = parse_chain_kind(q.str("kind", "rar"));
    p.buffer_bytes = q.u64("buffer_bytes", p.buffer_bytes);
    p.iters = q.u64("iters", p.iters);
    p.seed = q.u64("seed", p.seed);
    return gen_memchain(p);
  }
  if (name == "buflock") {
    q.expect_only({"buffer_bytes", "rounds", "protection"});
    BufLockScenario s;
    s.buffer_bytes = q.u64("buffer_bytes", s.buffer_bytes);
    s.rounds = q.u64("rounds", s.rounds);
    s.protection = parse_protection(q.str("protection", "buflock"));
    return gen_buflock(s);
  }
  if (name == "tag_buffer") {
    q.expect_only({"bytes", "reps", "strategy", "copy"});
    TagBufferParams p;
    p.bytes = q.u64("bytes", p.bytes);
    p.reps = q.u64("reps", p.reps);
    p.strategy = parse_bulk_strategy(q.str("strategy", "mixed_width"));
    p.copy = q.flag("copy", false);
    return gen_tag_buffer(p);
  }
  if (name == "kernel_mix") {
    q.expect_only({"kernel_bytes", "user_bytes", "rounds"});
    KernelMixParams p;
    p.kernel_bytes = q.u64("kernel_bytes", p.kernel_bytes);
    p.user_bytes = q.u64("user_bytes", p.user_bytes);
    p.rounds = q.u64("rounds", p.rounds);
    return gen_kernel_mix(p);
  }
  if (name == "stream") {
    q.expect_only({"bytes", "passes"});
    StreamParams p;
    p.bytes = q.u64("bytes", p.bytes);
    p.passes = q.u64("passes", p.passes);
    return gen_stream(p);
  }
  if (name == "sparse_scan") {
    q.expect_only({"total_bytes", "traced_bytes"});
    SparseScanParams p;
    p.total_bytes = q.u64("total_bytes", p.total_bytes);
    p.traced_bytes = q.u64("traced_bytes", p.traced_bytes);
    SparseScan s = gen_sparse_scan(p);
    Workload w;
    w.name = "sparse_scan";
    w.params = "total_bytes=" + std::to_string(p.total_bytes) + ";traced_bytes=" + std::to_string(p.traced_bytes);
    w.memory = std::move(s.memory);
    auto prog = std::make_shared<const Program>(std::move(s.program));
    w.phases.push_back(Phase{"scan", true, true, [prog](const InstrSink& sink) {
                               for (const Instruction& in : *prog) sink(in);
                             }});
    return w;
  }
  throw SimError(ErrorKind::kUnknownWorkload, "unknown workload '" + std::string(name) + "'");
}

}  // namespace mtesim
