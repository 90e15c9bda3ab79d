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

#ifndef MTESIM_TAGMEM_HPP_
#define MTESIM_TAGMEM_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtesim/types.hpp"

namespace mtesim {

struct Granule {
  Addr base = 0;
  friend bool operator==(const Granule&, const Granule&) = default;
};

enum class TagStorageScheme {
  // Tags live in a carve-out of DRAM; a line fill needs a second read.
  kReservedRegion,
  // Tags ride in the line's out-of-band bits; one transaction per fill.
  kCoLocated,
};

std::string_view to_string(TagStorageScheme s);
TagStorageScheme parse_storage_scheme(std::string_view s);

// Bytes of DRAM set aside for tags when protecting `data_bytes`.
std::uint64_t storage_overhead(TagStorageScheme scheme, std::uint64_t data_bytes);

// Minimal list of granules covering [addr, addr + len).
std::vector<Granule> granules_for_range(Addr addr, std::uint64_t len);

struct PageAttrs {
  bool taggable = false;
  bool kernel = false;
};

// Sparse byte-addressable memory with one 4-bit tag per 16-byte granule.
//
// Pages are materialized by map(); all other accesses to unmapped pages
// throw kUnmapped. Tag reads and writes on pages without the taggable
// attribute throw kNotTaggable.
class TaggedMemory {
 public:
  TaggedMemory() = default;
  TaggedMemory(const TaggedMemory& other);
  TaggedMemory& operator=(const TaggedMemory& other);
  TaggedMemory(TaggedMemory&&) noexcept = default;
  TaggedMemory& operator=(TaggedMemory&&) noexcept = default;

  // Maps every page overlapping [base, base + len). Remapping an existing
  // page only updates its attributes.
  void map(Addr base, std::uint64_t len, PageAttrs attrs);

  bool is_mapped(Addr addr) const;
  PageAttrs attrs(Addr addr) const;
  std::size_t mapped_pages() const { return pages_.size(); }

  void set_tag(Granule g, Tag tag);
  Tag get_tag(Granule g) const;

  void read(Addr addr, std::span<std::uint8_t> out) const;
  void write(Addr addr, std::span<const std::uint8_t> in);
  void fill(Addr addr, std::uint64_t len, std::uint8_t byte);
  std::uint64_t read_u64(Addr addr) const;
  void write_u64(Addr addr, std::uint64_t value);

  // One `addr_hex tag_hex` line per granule with a non-zero tag, ascending.
  void export_snapshot(std::ostream& os) const;
  std::string snapshot() const;

  friend bool operator==(const TaggedMemory& a, const TaggedMemory& b);

 private:
  struct Page {
    PageAttrs attrs;
    std::array<std::uint8_t, kPageBytes> data{};
    std::array<std::uint8_t, kGranulesPerPage> tags{};
  };

  Page& page_at(Addr addr);
  const Page& page_at(Addr addr) const;
  const Page* find(Addr addr) const;

  std::unordered_map<Addr, std::unique_ptr<Page>> pages_;
};

}  // namespace mtesim

#endif  // MTESIM_TAGMEM_HPP_
