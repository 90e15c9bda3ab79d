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

#ifndef MTESIM_TYPES_HPP_
#define MTESIM_TYPES_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mtesim {

using Addr = std::uint64_t;
using Cycle = std::uint64_t;

inline constexpr Addr kGranuleBytes = 16;
inline constexpr Addr kLineBytes = 64;
inline constexpr Addr kPageBytes = 4096;
inline constexpr Addr kGranulesPerLine = kLineBytes / kGranuleBytes;
inline constexpr Addr kGranulesPerPage = kPageBytes / kGranuleBytes;

constexpr Addr align_down(Addr a, Addr to) { return a & ~(to - 1); }
constexpr Addr align_up(Addr a, Addr to) { return (a + to - 1) & ~(to - 1); }
constexpr bool is_aligned(Addr a, Addr to) { return (a & (to - 1)) == 0; }
constexpr Addr line_of(Addr a) { return a / kLineBytes; }

enum class ErrorKind {
  kUnalignedGranule,
  kNotTaggable,
  kUnmapped,
  kOutOfSimMemory,
  kUntracedFault,
  kUnknownProfile,
  kUnknownWorkload,
  kParse,
  kInvalidArgument,
};

std::string_view to_string(ErrorKind kind);

class SimError : public std::runtime_error {
 public:
  SimError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// 4-bit memory / pointer colour.
class Tag {
 public:
  constexpr Tag() = default;
  constexpr explicit Tag(unsigned v) : value_(static_cast<std::uint8_t>(v & 0xF)) {
    if (v > 0xF) throw std::out_of_range("tag out of range");
  }

  constexpr unsigned value() const { return value_; }
  constexpr bool untagged() const { return value_ == 0; }
  friend constexpr bool operator==(Tag, Tag) = default;

 private:
  std::uint8_t value_ = 0;
};

// A 64-bit virtual address carrying a logical tag in bits [56:59].
class TaggedAddress {
 public:
  static constexpr unsigned kTagShift = 56;
  static constexpr std::uint64_t kTagMask = std::uint64_t{0xF} << kTagShift;

  constexpr TaggedAddress() = default;
  constexpr explicit TaggedAddress(std::uint64_t raw) : raw_(raw) {}

  static constexpr TaggedAddress make(Addr addr, Tag tag) {
    return TaggedAddress((addr & ~kTagMask) | (std::uint64_t{tag.value()} << kTagShift));
  }

  constexpr std::uint64_t raw() const { return raw_; }
  constexpr Tag tag() const { return Tag(static_cast<unsigned>((raw_ & kTagMask) >> kTagShift)); }
  constexpr Addr untagged() const { return raw_ & ~kTagMask; }
  constexpr TaggedAddress with_tag(Tag t) const { return make(untagged(), t); }
  constexpr TaggedAddress offset(std::int64_t delta) const {
    return make(untagged() + static_cast<std::uint64_t>(delta), tag());
  }

  friend constexpr bool operator==(TaggedAddress, TaggedAddress) = default;

 private:
  std::uint64_t raw_ = 0;
};

constexpr Tag extract_tag(TaggedAddress a) { return a.tag(); }
constexpr TaggedAddress make_tagged(Addr a, Tag t) { return TaggedAddress::make(a, t); }

}  // namespace mtesim

#endif  // MTESIM_TYPES_HPP_
