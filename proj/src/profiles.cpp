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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mtesim/uarch.hpp"

namespace mtesim {

namespace {

using Json = nlohmann::json;

void set_occupancy(CoreProfile& p, Op op, std::uint32_t cycles) { p.occupancy[static_cast<std::size_t>(op)] = cycles; }

// Wide out-of-order core whose synchronous tag-checked stores act as store
// barriers; generous tag-check tracking.
CoreProfile perf_x3() {
  CoreProfile p;
  p.name = "perf_x3";
  p.issue_width = 6;
  p.rob_size = 320;
  p.lq_size = 64;
  p.sb_size = 40;
  p.load_units = 3;
  p.store_units = 2;
  set_occupancy(p, Op::kStg, 2);
  set_occupancy(p, Op::kSt2g, 2);
  set_occupancy(p, Op::kStzg, 2);
  set_occupancy(p, Op::kStz2g, 6);
  set_occupancy(p, Op::kStgp, 2);
  set_occupancy(p, Op::kDcGva, 15);
  p.llc_bytes = 8u << 20;
  p.hit_latency = 4;
  p.miss_latency = 200;
  p.mem_interval = 2;
  p.tag_fetch_latency = 0;
  p.tag_fetch_interval = 1;
  p.storage = TagStorageScheme::kReservedRegion;
  p.prefetch = PrefetchKind::kStride;
  p.prefetch_degree = 4;
  p.store_drain_latency = 7;
  p.serialized_mte_stores = true;
  p.store_tagcheck_roundtrip = 7;
  p.tag_check_slots = 64;
  return p;
}

// Mid-size out-of-order core; tag checks for outstanding misses compete for
// a small tracking pool.
CoreProfile big_a715() {
  CoreProfile p;
  p.name = "big_a715";
  p.issue_width = 5;
  p.rob_size = 160;
  p.lq_size = 32;
  p.sb_size = 24;
  p.load_units = 2;
  p.store_units = 2;
  set_occupancy(p, Op::kDcGva, 14);
  p.llc_bytes = 8u << 20;
  p.hit_latency = 4;
  p.miss_latency = 200;
  p.mem_interval = 4;
  p.tag_fetch_latency = 0;
  p.tag_fetch_interval = 1;
  p.storage = TagStorageScheme::kReservedRegion;
  p.prefetch = PrefetchKind::kNextLine;
  p.prefetch_degree = 2;
  p.store_drain_latency = 4;
  p.tag_check_slots = 6;
  return p;
}

// Narrow in-order-like core: small window, one port of each kind.
CoreProfile little_a510() {
  CoreProfile p;
  p.name = "little_a510";
  p.issue_width = 2;
  p.rob_size = 16;
  p.lq_size = 8;
  p.sb_size = 8;
  p.load_units = 1;
  p.store_units = 1;
  set_occupancy(p, Op::kSt2g, 2);
  set_occupancy(p, Op::kStz2g, 2);
  set_occupancy(p, Op::kDcGva, 5);
  p.llc_bytes = 8u << 20;
  p.hit_latency = 3;
  p.miss_latency = 200;
  p.mem_interval = 4;
  p.storage = TagStorageScheme::kReservedRegion;
  p.prefetch = PrefetchKind::kNextLine;
  p.prefetch_degree = 1;
  p.store_drain_latency = 3;
  p.tag_check_slots = 2;
  p.tag_check_hold = 2;
  return p;
}

// Server core with tags kept alongside data, forwarding that ignores tags,
// and checks that still run when faults are suppressed.
CoreProfile ampere_one() {
  CoreProfile p;
  p.name = "ampere_one";
  p.issue_width = 4;
  p.rob_size = 192;
  p.lq_size = 48;
  p.sb_size = 36;
  p.load_units = 2;
  p.store_units = 2;
  set_occupancy(p, Op::kStg, 2);
  set_occupancy(p, Op::kSt2g, 4);
  set_occupancy(p, Op::kStzg, 2);
  set_occupancy(p, Op::kStz2g, 4);
  set_occupancy(p, Op::kStgp, 2);
  set_occupancy(p, Op::kDcGva, 2);
  p.llc_bytes = 2u << 20;
  p.hit_latency = 4;
  p.miss_latency = 60;
  p.mem_interval = 1;
  p.storage = TagStorageScheme::kCoLocated;
  p.prefetch = PrefetchKind::kStride;
  p.prefetch_degree = 4;
  p.store_drain_latency = 4;
  p.tag_check_slots = 18;
  p.tag_check_hold = 2;
  p.suppressed_checks_still_cost = true;
  p.stlf_tag_aware = false;
  p.stlf_fail_prob = 0.01;
  return p;
}

CoreProfile ampere_one_fixed() {
  CoreProfile p = ampere_one();
  p.name = "ampere_one_fixed";
  p.suppressed_checks_still_cost = false;
  return p;
}

CoreProfile ampere_one_stlf_off() {
  CoreProfile p = ampere_one();
  p.name = "ampere_one_stlf_off";
  p.stlf_enabled = false;
  return p;
}

struct PresetEntry {
  std::string_view name;
  CoreProfile (*make)();
};

constexpr PresetEntry kPresets[] = {
    {"perf_x3", perf_x3},       {"big_a715", big_a715},
    {"little_a510", little_a510}, {"ampere_one", ampere_one},
    {"ampere_one_fixed", ampere_one_fixed}, {"ampere_one_stlf_off", ampere_one_stlf_off},
};

constexpr std::array<std::pair<Op, std::string_view>, kNumOps> kOccupancyKeys{{
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

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& e : kPresets) out.emplace_back(e.name);
  return out;
}

CoreProfile preset(std::string_view name) {
  for (const auto& e : kPresets)
    if (e.name == name) return e.make();
  throw SimError(ErrorKind::kUnknownProfile, "no profile named '" + std::string(name) + "'");
}

CoreProfile profile_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
  } catch (const Json::exception& e) {
    throw SimError(ErrorKind::kParse, std::string("profile document: ") + e.what());
  }
  if (!j.is_object()) throw SimError(ErrorKind::kParse, "profile document must be an object");

  static const std::vector<std::string> kKeys = {
      "base", "name", "issue_width", "rob_size", "lq_size", "sb_size", "load_units", "store_units", "occupancy",
      "llc_bytes", "llc_ways", "line_bytes", "hit_latency", "miss_latency", "mem_interval", "tag_fetch_latency",
      "tag_fetch_interval", "storage", "prefetch", "prefetch_degree", "store_drain_latency",
      "serialized_mte_stores", "store_tagcheck_roundtrip", "tag_check_slots", "tag_check_hold",
      "sync_load_latency", "suppressed_checks_still_cost", "stlf_enabled", "stlf_tag_aware", "stlf_fail_prob",
      "stlf_latency", "seed"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
      throw SimError(ErrorKind::kParse, "unknown profile key '" + key + "'");
  }

  try {
    CoreProfile p = j.contains("base") ? preset(j["base"].get<std::string>()) : CoreProfile{};
    read(j, "name", p.name);
    read(j, "issue_width", p.issue_width);
    read(j, "rob_size", p.rob_size);
    read(j, "lq_size", p.lq_size);
    read(j, "sb_size", p.sb_size);
    read(j, "load_units", p.load_units);
    read(j, "store_units", p.store_units);
    if (auto it = j.find("occupancy"); it != j.end()) {
      for (const auto& [key, value] : it->items()) {
        auto op = std::find_if(kOccupancyKeys.begin(), kOccupancyKeys.end(),
                               [&](const auto& kv) { return kv.second == key; });
        if (op == kOccupancyKeys.end()) throw SimError(ErrorKind::kParse, "unknown occupancy key '" + key + "'");
        set_occupancy(p, op->first, value.get<std::uint32_t>());
      }
    }
    read(j, "llc_bytes", p.llc_bytes);
    read(j, "llc_ways", p.llc_ways);
    read(j, "line_bytes", p.line_bytes);
    read(j, "hit_latency", p.hit_latency);
    read(j, "miss_latency", p.miss_latency);
    read(j, "mem_interval", p.mem_interval);
    read(j, "tag_fetch_latency", p.tag_fetch_latency);
    read(j, "tag_fetch_interval", p.tag_fetch_interval);
    if (j.contains("storage")) p.storage = parse_storage_scheme(j["storage"].get<std::string>());
    if (j.contains("prefetch")) p.prefetch = parse_prefetch(j["prefetch"].get<std::string>());
    read(j, "prefetch_degree", p.prefetch_degree);
    read(j, "store_drain_latency", p.store_drain_latency);
    read(j, "serialized_mte_stores", p.serialized_mte_stores);
    read(j, "store_tagcheck_roundtrip", p.store_tagcheck_roundtrip);
    read(j, "tag_check_slots", p.tag_check_slots);
    read(j, "tag_check_hold", p.tag_check_hold);
    read(j, "sync_load_latency", p.sync_load_latency);
    read(j, "suppressed_checks_still_cost", p.suppressed_checks_still_cost);
    read(j, "stlf_enabled", p.stlf_enabled);
    read(j, "stlf_tag_aware", p.stlf_tag_aware);
    read(j, "stlf_fail_prob", p.stlf_fail_prob);
    read(j, "stlf_latency", p.stlf_latency);
    read(j, "seed", p.seed);
    p.validate();
    return p;
  } catch (const Json::exception& e) {
    throw SimError(ErrorKind::kParse, std::string("profile document: ") + e.what());
  }
}

std::string profile_to_json(const CoreProfile& p) {
  Json occ = Json::object();
  for (const auto& [op, key] : kOccupancyKeys) occ[std::string(key)] = p.op_occupancy(op);
  Json j = {
      {"name", p.name},
      {"issue_width", p.issue_width},
      {"rob_size", p.rob_size},
      {"lq_size", p.lq_size},
      {"sb_size", p.sb_size},
      {"load_units", p.load_units},
      {"store_units", p.store_units},
      {"occupancy", occ},
      {"llc_bytes", p.llc_bytes},
      {"llc_ways", p.llc_ways},
      {"line_bytes", p.line_bytes},
      {"hit_latency", p.hit_latency},
      {"miss_latency", p.miss_latency},
      {"mem_interval", p.mem_interval},
      {"tag_fetch_latency", p.tag_fetch_latency},
      {"tag_fetch_interval", p.tag_fetch_interval},
      {"storage", std::string(to_string(p.storage))},
      {"prefetch", std::string(to_string(p.prefetch))},
      {"prefetch_degree", p.prefetch_degree},
      {"store_drain_latency", p.store_drain_latency},
      {"serialized_mte_stores", p.serialized_mte_stores},
      {"store_tagcheck_roundtrip", p.store_tagcheck_roundtrip},
      {"tag_check_slots", p.tag_check_slots},
      {"tag_check_hold", p.tag_check_hold},
      {"sync_load_latency", p.sync_load_latency},
      {"suppressed_checks_still_cost", p.suppressed_checks_still_cost},
      {"stlf_enabled", p.stlf_enabled},
      {"stlf_tag_aware", p.stlf_tag_aware},
      {"stlf_fail_prob", p.stlf_fail_prob},
      {"stlf_latency", p.stlf_latency},
      {"seed", p.seed},
  };
  return j.dump(2);
}

CoreProfile load_profile(std::string_view name_or_path) {
  for (const auto& e : kPresets)
    if (e.name == name_or_path) return e.make();
  const std::filesystem::path path(name_or_path);
  if (!std::filesystem::is_regular_file(path))
    throw SimError(ErrorKind::kUnknownProfile, "no preset or profile file named '" + std::string(name_or_path) + "'");
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return profile_from_json(buf.str());
}

}  // namespace mtesim
