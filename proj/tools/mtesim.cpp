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


// Command-line harness.
//
// Every command builds its whole output in memory and writes it in one
// rename, so a failed run leaves no partial file. Exit status: 0 success,
// 2 usage error, 3 simulation error.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mtesim/alloc.hpp"
#include "mtesim/analogs.hpp"
#include "mtesim/isa.hpp"
#include "mtesim/tracer.hpp"
#include "mtesim/uarch.hpp"
#include "mtesim/workloads.hpp"

namespace mtesim::cli {
namespace {

using Json = nlohmann::ordered_json;

constexpr int kUsageError = 2;
constexpr int kSimError = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_usage(ErrorKind k) {
  return k == ErrorKind::kUnknownProfile || k == ErrorKind::kUnknownWorkload || k == ErrorKind::kParse ||
         k == ErrorKind::kInvalidArgument;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Empty path means stdout.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text << std::flush;
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write " + tmp);
    out << text;
    if (!out.flush()) throw UsageError("cannot write " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

// `--key value` and `--key=value` pairs left over after the named options.
WorkloadParams parse_extras(const std::vector<std::string>& args) {
  WorkloadParams q;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0 || a.size() == 2) throw UsageError("unexpected argument '" + a + "'");
    const std::string body = a.substr(2);
    if (const auto eq = body.find('='); eq != std::string::npos) {
      q.set(body.substr(0, eq), body.substr(eq + 1));
    } else if (i + 1 < args.size() && args[i + 1].rfind("--", 0) != 0) {
      q.set(body, args[++i]);
    } else {
      q.set(body, "");
    }
  }
  return q;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

bool takes_seed(const std::string& workload) {
  for (const WorkloadInfo& w : workload_catalog())
    if (w.name == workload) return (" " + w.keys + " ").find(" seed ") != std::string::npos;
  return false;
}

// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads.
template <typename Fn>
void parallel_for(std::size_t n, Fn fn) {
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, n == 0 ? 1 : n);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Experiment specs.

struct ExperimentSpec {
  std::string workload;
  std::map<std::string, std::string> params;
  std::string profile = "big_a715";
  std::string mode = "sync";
  std::string analog;  // empty: none
  std::uint64_t reps = 1;
  std::uint64_t seed = 1;
  bool stlf_off = false;
};

Json to_json(const ExperimentSpec& s) {
  Json j;
  j["workload"] = s.workload;
  j["params"] = s.params;
  j["profile"] = s.profile;
  j["mode"] = s.mode;
  j["analog"] = s.analog;
  j["reps"] = s.reps;
  j["seed"] = s.seed;
  j["stlf_off"] = s.stlf_off;
  return j;
}

ExperimentSpec spec_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw SimError(ErrorKind::kParse, std::string("experiment spec: ") + e.what());
  }
  ExperimentSpec s;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "workload") s.workload = value.get<std::string>();
      else if (key == "params") s.params = value.get<std::map<std::string, std::string>>();
      else if (key == "profile") s.profile = value.get<std::string>();
      else if (key == "mode") s.mode = value.get<std::string>();
      else if (key == "analog") s.analog = value.get<std::string>();
      else if (key == "reps") s.reps = value.get<std::uint64_t>();
      else if (key == "seed") s.seed = value.get<std::uint64_t>();
      else if (key == "stlf_off") s.stlf_off = value.get<bool>();
      else throw SimError(ErrorKind::kParse, "experiment spec: unknown key '" + key + "'");
    }
  } catch (const Json::exception& e) {
    throw SimError(ErrorKind::kParse, std::string("experiment spec: ") + e.what());
  }
  return s;
}

CoreProfile resolve_profile(const std::string& name, bool stlf_off) {
  CoreProfile p = load_profile(name);
  if (stlf_off) p.stlf_enabled = false;
  return p;
}

constexpr const char* kCounterColumns =
    "instructions,tag_checks,tag_check_stalls,slot_stalls,stlf_hits,stlf_misses,line_misses,"
    "extra_tag_transactions,faults";

std::vector<double> counter_values(const CostCounters& c) {
  return {double(c.instructions), double(c.tag_checks),   double(c.tag_check_stalls),
          double(c.slot_stalls),  double(c.stlf_hits),    double(c.stlf_misses),
          double(c.line_misses),  double(c.extra_tag_transactions), double(c.faults)};
}

std::string run_experiment(const ExperimentSpec& s) {
  if (s.workload.empty()) throw UsageError("run: --workload is required");
  if (s.reps == 0) throw UsageError("run: --reps must be positive");
  const MteMode mode = parse_mode(s.mode);
  std::optional<AnalogKind> analog;
  if (!s.analog.empty()) analog = parse_analog(s.analog);
  const CoreProfile base_profile = resolve_profile(s.profile, s.stlf_off);

  // Columns after `params`: seed, cycles, baseline_cycles, slowdown, counters.
  std::vector<std::vector<double>> rows;
  std::string params_text;
  for (std::uint64_t r = 0; r < s.reps; ++r) {
    WorkloadParams q(s.params);
    if (takes_seed(s.workload) && !s.params.count("seed")) q.set("seed", std::to_string(s.seed + r));
    const Workload w = make_workload(s.workload, q);
    params_text = w.params;
    CoreProfile p = base_profile;
    p.seed = s.seed + r;
    CostReport measured;
    CostReport baseline;
    if (analog) {
      // Analogs run with checks off against the build without tag ops.
      measured = run_workload(apply_analog(w, *analog), p, MteMode::kOff);
      baseline = run_workload(strip_tag_ops(w), p, MteMode::kOff);
    } else {
      measured = run_workload(w, p, mode);
      baseline = run_workload(w, p, MteMode::kOff);
    }
    std::vector<double> row = {double(s.seed + r), double(measured.cycles), double(baseline.cycles),
                               measured.slowdown_vs(baseline)};
    for (double v : counter_values(measured.counts)) row.push_back(v);
    rows.push_back(std::move(row));
  }

  const std::string mode_text = analog ? "off" : std::string(to_string(mode));
  const std::string prefix = fmt::format("{},{},{},{},\"{}\"", base_profile.name, mode_text, s.analog, s.workload,
                                         params_text);
  std::string out = fmt::format("row,profile,mode,analog,workload,params,seed,cycles,baseline_cycles,slowdown,{}\n",
                                kCounterColumns);
  auto number = [](double v, std::size_t col) {
    return col == 3 ? fmt::format("{:.6f}", v) : fmt::format("{}", v);
  };
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += fmt::format("rep{},{}", r, prefix);
    for (std::size_t c = 0; c < rows[r].size(); ++c) out += "," + number(rows[r][c], c);
    out += "\n";
  }
  const std::size_t ncols = rows.front().size();
  for (const char* stat : {"median", "min", "max"}) {
    out += fmt::format("{},{},,", stat, prefix);
    for (std::size_t c = 1; c < ncols; ++c) {
      std::vector<double> col;
      for (const auto& row : rows) col.push_back(row[c]);
      std::sort(col.begin(), col.end());
      double v = col.front();
      if (std::string(stat) == "max") v = col.back();
      if (std::string(stat) == "median") {
        const std::size_t n = col.size();
        v = n % 2 ? col[n / 2] : (col[n / 2 - 1] + col[n / 2]) / 2;
      }
      out += (c == 1 ? "" : ",") + number(v, c);
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps: a matrix of slowdowns over two parameters, one panel per value of
// a third.

struct Axis {
  std::string key;
  std::vector<std::string> values;
};

Axis parse_axis(const std::string& text, const char* what) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError(std::string("--") + what + " expects key=v1,v2,...");
  Axis a{text.substr(0, eq), split(text.substr(eq + 1), ',')};
  if (a.values.empty()) throw UsageError(std::string("--") + what + ": grid is empty");
  return a;
}

std::uint64_t axis_number(const std::string& key, const std::string& value) {
  WorkloadParams q;
  q.set(key, value);
  return q.u64(key, 0);
}

std::string run_sweep(const std::string& workload, const std::map<std::string, std::string>& fixed,
                      const Axis& rows, const Axis& cols, const Axis& panels, const CoreProfile& profile,
                      MteMode mode) {
  // Column key AL sets L = value / A for llbench, so columns are footprints.
  const bool footprint = cols.key == "AL";
  if (footprint && (workload != "llbench" || rows.key != "A"))
    throw UsageError("sweep: column key AL needs the llbench workload with rows over A");
  const std::size_t nr = rows.values.size(), nc = cols.values.size(), np = panels.values.size();
  std::vector<double> cell(np * nr * nc);
  parallel_for(cell.size(), [&](std::size_t i) {
    const std::size_t p = i / (nr * nc), r = i / nc % nr, c = i % nc;
    WorkloadParams q(fixed);
    q.set(panels.key, panels.values[p]);
    q.set(rows.key, rows.values[r]);
    if (footprint) {
      const std::uint64_t a = axis_number("A", rows.values[r]);
      q.set("L", std::to_string(std::max<std::uint64_t>(1, axis_number("AL", cols.values[c]) / a)));
    } else {
      q.set(cols.key, cols.values[c]);
    }
    const Workload w = make_workload(workload, q);
    cell[i] = run_workload(w, profile, mode).slowdown_vs(run_workload(w, profile, MteMode::kOff));
  });
  std::string out = fmt::format("{},{}\\{}", panels.key, rows.key, cols.key);
  for (const std::string& v : cols.values) out += "," + v;
  out += "\n";
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t r = 0; r < nr; ++r) {
      out += panels.values[p] + "," + rows.values[r];
      for (std::size_t c = 0; c < nc; ++c) out += fmt::format(",{:.4f}", cell[(p * nr + r) * nc + c]);
      out += "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// exec: run a program text on auto-mapped or explicitly mapped pages.

void map_region(TaggedMemory& mem, const std::string& text) {
  const std::vector<std::string> parts = split(text, ':');
  if (parts.size() < 2) throw UsageError("--map expects base:len[:untagged][:kernel]");
  PageAttrs attrs{true, false};
  for (std::size_t i = 2; i < parts.size(); ++i) {
    if (parts[i] == "untagged") attrs.taggable = false;
    else if (parts[i] == "kernel") attrs.kernel = true;
    else throw UsageError("--map: unknown attribute '" + parts[i] + "'");
  }
  try {
    mem.map(std::stoull(parts[0], nullptr, 0), std::stoull(parts[1], nullptr, 0), attrs);
  } catch (const std::logic_error&) {
    throw UsageError("--map: bad number in '" + text + "'");
  }
}

std::string run_exec(const Program& program, const std::vector<std::string>& maps, const CoreProfile& profile,
                     const CheckConfig& cfg, MteMode mode) {
  TaggedMemory mem;
  for (const std::string& m : maps) map_region(mem, m);
  if (maps.empty()) {
    // Every touched page becomes a taggable page.
    for (const Instruction& in : program) {
      if (!is_memory_op(in.op)) continue;
      const Addr end = in.begin() + std::max<std::uint64_t>(in.length(), 1);
      for (Addr p = align_down(in.begin(), kPageBytes); p < end; p += kPageBytes)
        if (!mem.is_mapped(p)) mem.map(p, kPageBytes, PageAttrs{true, in.kernel});
    }
  }
  const ExecResult r = execute(program, mem, cfg, mode);
  const CostReport c = simulate(program, mem, profile, cfg, mode);
  std::string out = fmt::format("profile,mode,cycles,executed,halted,{}\n", kCounterColumns);
  out += fmt::format("{},{},{},{},{}", profile.name, to_string(mode), c.cycles, r.executed, r.halted ? 1 : 0);
  for (double v : counter_values(c.counts)) out += fmt::format(",{}", v);
  out += "\nfault,kind,instr,reported_at,address\n";
  for (const FaultRecord& f : r.faults) {
    out += fmt::format("fault,{},{},{},0x{:x}\n", f.kind == FaultKind::kSyncTagFault ? "sync" : "async", f.instr_index ? std::to_string(*f.instr_index) : "",
                       f.reported_at, f.address.raw());
  }
  return out;
}

// ---------------------------------------------------------------------------
// alloc-replay

std::string run_alloc_replay(const std::string& trace_text, const AllocPolicy& policy, BulkTagStrategy strategy) {
  const std::vector<AllocEvent> events = parse_alloc_trace(trace_text);
  constexpr Addr kHeap = 0x100000000;
  std::uint64_t need = kPageBytes;
  for (const AllocEvent& e : events)
    if (e.is_malloc) need += align_up(std::max<std::uint64_t>(e.value, 1), kGranuleBytes);
  if (need > kSimMemoryBudget) throw SimError(ErrorKind::kOutOfSimMemory, "alloc trace exceeds the heap budget");
  TaggedMemory mem;
  TaggedHeap heap(mem, kHeap, align_up(need, kPageBytes), policy, strategy);
  std::vector<TaggedAddress> ids;
  std::string out = "line,op,arg,address,tag,tag_ops\n";
  for (std::size_t i = 0; i < events.size(); ++i) {
    const AllocEvent& e = events[i];
    const std::uint64_t before = heap.tag_op_count();
    if (e.is_malloc) {
      const TaggedAddress a = heap.malloc(e.value);
      ids.push_back(a);
      out += fmt::format("{},malloc,{},0x{:x},{},{}\n", i, e.value, a.untagged(), a.tag().value(),
                         heap.tag_op_count() - before);
    } else {
      if (e.value >= ids.size()) throw SimError(ErrorKind::kInvalidArgument, fmt::format("free of unknown id {}", e.value));
      heap.free(ids[e.value]);
      out += fmt::format("{},free,{},0x{:x},{},{}\n", i, e.value, ids[e.value].untagged(),
                         ids[e.value].tag().value(), heap.tag_op_count() - before);
    }
  }
  out += fmt::format("total,,,,,{}\n", heap.tag_op_count());
  return out;
}

// ---------------------------------------------------------------------------

int real_main(int argc, char** argv) {
  CLI::App app{"Tagged-memory timing simulator"};
  app.require_subcommand(1);
  std::string out_path;
  app.add_option("--out", out_path, "output file (default stdout)");

  // run
  ExperimentSpec spec;
  std::string spec_path, save_spec;
  auto* run = app.add_subcommand("run", "run one workload; extra --key value pairs set workload parameters");
  run->allow_extras();
  run->add_option("--workload", spec.workload, "workload name");
  run->add_option("--profile", spec.profile, "preset name or profile JSON path");
  run->add_option("--mode", spec.mode, "off, sync, async or asymm");
  run->add_option("--analog", spec.analog, "hakc or sfitag; runs the analog with checks off");
  run->add_option("--seed", spec.seed, "seed of the first repetition");
  run->add_option("--reps", spec.reps, "repetitions, each with the next seed");
  run->add_flag("--stlf-off", spec.stlf_off, "disable store-to-load forwarding");
  run->add_option("--spec", spec_path, "load the experiment from a JSON spec");
  run->add_option("--save-spec", save_spec, "write the experiment as a JSON spec");
  run->add_option("--out", out_path, "output file (default stdout)");

  // sweep
  std::string sw_workload = "llbench", sw_profile = "big_a715", sw_mode = "async";
  std::string sw_rows = "A=256,512,1024,2048", sw_cols = "AL=1M,2M,4M,8M,16M", sw_panels = "S=4,128";
  bool sw_stlf_off = false;
  auto* sweep = app.add_subcommand("sweep", "slowdown matrix over rows x cols, one panel per value");
  sweep->allow_extras();
  sweep->add_option("--workload", sw_workload, "workload name");
  sweep->add_option("--profile", sw_profile, "preset name or profile JSON path");
  sweep->add_option("--mode", sw_mode, "check mode compared against off");
  sweep->add_option("--rows", sw_rows, "key=v1,v2,...");
  sweep->add_option("--cols", sw_cols, "key=v1,v2,...; AL sets L = value / A for llbench");
  sweep->add_option("--panels", sw_panels, "key=v1,v2,...");
  sweep->add_flag("--stlf-off", sw_stlf_off, "disable store-to-load forwarding");
  sweep->add_option("--out", out_path, "output file (default stdout)");

  // analog-compare
  std::vector<std::string> ac_profiles = {"perf_x3", "big_a715", "little_a510", "ampere_one"};
  std::vector<std::string> ac_modes = {"sync", "async"};
  auto* ac = app.add_subcommand("analog-compare", "real vs analog-predicted slowdowns on the shipped workload set");
  ac->add_option("--profile", ac_profiles, "profiles")->delimiter(',');
  ac->add_option("--mode", ac_modes, "modes")->delimiter(',');
  ac->add_option("--out", out_path, "output file (default stdout)");

  // trace
  std::string tr_kind = "all", tr_profile = "big_a715", tr_log;
  std::string tr_total = "1M", tr_traced = "64";
  auto* trace = app.add_subcommand("trace", "trace a sparse scan with each tracer");
  trace->add_option("--tracer", tr_kind, "mte_signal, mte_kernel, page_perm, dbi_inline or all");
  trace->add_option("--profile", tr_profile, "preset name or profile JSON path");
  trace->add_option("--total-bytes", tr_total, "bytes scanned");
  trace->add_option("--traced-bytes", tr_traced, "bytes traced");
  trace->add_option("--log", tr_log, "write the event log of the first tracer here");
  trace->add_option("--out", out_path, "output file (default stdout)");

  // alloc-replay
  std::string ar_trace, ar_strategy = "mixed_width";
  AllocPolicy ar_policy;
  std::uint64_t ar_threshold = 0;
  auto* ar = app.add_subcommand("alloc-replay", "replay a malloc/free trace through the tagged heap");
  ar->add_option("--trace", ar_trace, "trace file")->required();
  ar->add_option("--strategy", ar_strategy, "bulk-tag strategy");
  ar->add_option("--seed", ar_policy.tag_rng_seed, "tag RNG seed");
  ar->add_option("--selective-threshold", ar_threshold, "leave allocations above this size untagged");
  ar->add_flag("--sticky", ar_policy.sticky_reuse, "reused blocks keep their tag");
  ar->add_flag("--exclude-previous", ar_policy.exclude_previous_tag, "never reuse the previous tag of a block");
  ar->add_option("--out", out_path, "output file (default stdout)");

  // exec
  std::string ex_program, ex_profile = "big_a715", ex_mode = "sync";
  std::vector<std::string> ex_maps;
  CheckConfig ex_cfg;
  auto* ex = app.add_subcommand("exec", "execute and time a program text");
  ex->add_option("--program", ex_program, "program file")->required();
  ex->add_option("--profile", ex_profile, "preset name or profile JSON path");
  ex->add_option("--mode", ex_mode, "check mode");
  ex->add_option("--map", ex_maps, "base:len[:untagged][:kernel]; default maps every touched page");
  ex->add_flag("--tco", ex_cfg.tco, "set the tag-check override");
  ex->add_flag("--tcma1", ex_cfg.tcma1, "skip kernel checks through tag-0 pointers");
  ex->add_option("--out", out_path, "output file (default stdout)");

  // profiles
  std::string pr_dump;
  auto* profiles = app.add_subcommand("profiles", "list presets or dump one as JSON");
  profiles->add_option("--dump", pr_dump, "preset name or profile JSON path");
  profiles->add_option("--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    std::string text;
    if (*run) {
      if (!spec_path.empty()) spec = spec_from_json(read_file(spec_path));
      const WorkloadParams extras = parse_extras(run->remaining());
      for (const auto& [k, v] : extras.entries()) spec.params[k] = v;
      if (!save_spec.empty()) emit(save_spec, to_json(spec).dump(2) + "\n");
      text = run_experiment(spec);
    } else if (*sweep) {
      text = run_sweep(sw_workload, parse_extras(sweep->remaining()).entries(), parse_axis(sw_rows, "rows"),
                       parse_axis(sw_cols, "cols"), parse_axis(sw_panels, "panels"),
                       resolve_profile(sw_profile, sw_stlf_off), parse_mode(sw_mode));
    } else if (*ac) {
      std::vector<CoreProfile> ps;
      for (const std::string& p : ac_profiles) ps.push_back(load_profile(p));
      std::vector<MteMode> ms;
      for (const std::string& m : ac_modes) ms.push_back(parse_mode(m));
      const std::vector<AnalogRow> rows = compare_analogs(analog_workload_set(), ps, ms);
      text = analog_csv(rows);
      if (const auto w = divergence_witness(rows))
        std::cerr << "divergence witness: " << w->workload << " on " << w->profile << "\n";
    } else if (*trace) {
      WorkloadParams q;
      q.set("total", tr_total);
      q.set("traced", tr_traced);
      const SparseScan s = gen_sparse_scan(SparseScanParams{q.u64("total", 0), q.u64("traced", 0)});
      std::vector<TracerKind> kinds;
      if (tr_kind == "all") kinds.assign(std::begin(kAllTracers), std::end(kAllTracers));
      else kinds.push_back(parse_tracer(tr_kind));
      const CoreProfile p = load_profile(tr_profile);
      text = "tracer,events,spurious,base_cycles,overhead,cycles\n";
      std::string log;
      for (TracerKind k : kinds) {
        const TraceResult r = trace_run(s.program, s.memory, s.traced, k, {}, p);
        text += fmt::format("{},{},{},{},{},{}\n", to_string(k), r.log.size(), r.spurious, r.base_cycles, r.overhead,
                            r.report.cycles);
        if (log.empty()) log = to_csv(r.log);
      }
      if (!tr_log.empty()) emit(tr_log, log);
    } else if (*ar) {
      if (ar_threshold > 0) ar_policy.selective_threshold = ar_threshold;
      text = run_alloc_replay(read_file(ar_trace), ar_policy, parse_bulk_strategy(ar_strategy));
    } else if (*ex) {
      text = run_exec(parse_program(read_file(ex_program)), ex_maps, load_profile(ex_profile), ex_cfg,
                      parse_mode(ex_mode));
    } else if (*profiles) {
      if (pr_dump.empty()) {
        for (const std::string& n : preset_names()) text += n + "\n";
      } else {
        text = profile_to_json(load_profile(pr_dump)) + "\n";
      }
    }
    emit(out_path, text);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_usage(e.kind()) ? kUsageError : kSimError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSimError;
  }
  return 0;
}

}  // namespace
}  // namespace mtesim::cli

int main(int argc, char** argv) { return mtesim::cli::real_main(argc, argv); }
