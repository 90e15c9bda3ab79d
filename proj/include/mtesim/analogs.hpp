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

// Software stand-ins for MTE cost, run with tag checking off.
//
// kHakc replaces every tag op with a dead plain access of the same coverage.
// kSfiTag does the same and follows every load and store with a dead load
// of the same cache line.

#ifndef MTESIM_ANALOGS_HPP_
#define MTESIM_ANALOGS_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mtesim/isa.hpp"
#include "mtesim/uarch.hpp"
#include "mtesim/workloads.hpp"

namespace mtesim {

enum class AnalogKind { kHakc, kSfiTag };

std::string_view to_string(AnalogKind k);
AnalogKind parse_analog(std::string_view s);

// Streaming form of the transform. Dependencies of incoming instructions
// refer to the input stream; emitted ones refer to the output stream.
class AnalogRewriter {
 public:
  AnalogRewriter(AnalogKind kind, InstrSink out) : kind_(kind), out_(std::move(out)) {}

  void operator()(const Instruction& in);
  std::size_t emitted() const { return emitted_; }

 private:
  AnalogKind kind_;
  InstrSink out_;
  std::vector<std::uint32_t> index_;  // input index -> output index
  std::size_t emitted_ = 0;
};

Program apply_analog(const Program& program, AnalogKind kind);
Workload apply_analog(const Workload& w, AnalogKind kind);

// Build without MTE: every tag op becomes a Nop with the same dependencies.
// This is the baseline both the analogs and the real modes are normalized to.
Program strip_tag_ops(const Program& program);
Workload strip_tag_ops(const Workload& w);

struct AnalogRow {
  std::string workload;
  std::string profile;
  MteMode mode = MteMode::kSync;
  double real = 1.0;  // cycles(mode) / cycles(stripped, off)
  double hakc = 1.0;  // predicted overheads
  double sfitag = 1.0;

  double hakc_error() const { return (hakc - real) / real; }
  double sfitag_error() const { return (sfitag - real) / real; }
};

struct AnalogCase {
  std::string label;
  Workload workload;
};

// Small instances of the shipped generators.
std::vector<AnalogCase> analog_workload_set();

std::vector<AnalogRow> compare_analogs(const std::vector<AnalogCase>& cases, const std::vector<CoreProfile>& profiles,
                                       const std::vector<MteMode>& modes);

// First row where the two analogs err in opposite directions.
std::optional<AnalogRow> divergence_witness(const std::vector<AnalogRow>& rows);

std::string analog_csv(const std::vector<AnalogRow>& rows);

}  // namespace mtesim

#endif  // MTESIM_ANALOGS_HPP_
