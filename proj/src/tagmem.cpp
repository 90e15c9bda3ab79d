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

#include "mtesim/tagmem.hpp"

#include <algorithm>
#include <cstring>
#include <ostream>
#include <sstream>
#include <utility>

namespace mtesim {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUnalignedGranule: return "UnalignedGranule";
    case ErrorKind::kNotTaggable: return "NotTaggable";
    case ErrorKind::kUnmapped: return "Unmapped";
    case ErrorKind::kOutOfSimMemory: return "OutOfSimMemory";
    case ErrorKind::kUntracedFault: return "UntracedFault";
    case ErrorKind::kUnknownProfile: return "UnknownProfile";
    case ErrorKind::kUnknownWorkload: return "UnknownWorkload";
    case ErrorKind::kParse: return "ParseError";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

std::string_view to_string(TagStorageScheme s) {
  return s == TagStorageScheme::kReservedRegion ? "reserved_region" : "co_located";
}

TagStorageScheme parse_storage_scheme(std::string_view s) {
  if (s == "reserved_region") return TagStorageScheme::kReservedRegion;
  if (s == "co_located") return TagStorageScheme::kCoLocated;
  throw SimError(ErrorKind::kParse, "unknown tag storage scheme '" + std::string(s) + "'");
}

std::uint64_t storage_overhead(TagStorageScheme scheme, std::uint64_t data_bytes) {
  if (scheme == TagStorageScheme::kCoLocated) return 0;
  // 4 bits per 16 bytes == 1 byte per 32 bytes.
  return (data_bytes + 31) / 32;
}

std::vector<Granule> granules_for_range(Addr addr, std::uint64_t len) {
  std::vector<Granule> out;
  if (len == 0) return out;
  const Addr first = align_down(addr, kGranuleBytes);
  const Addr end = align_up(addr + len, kGranuleBytes);
  out.reserve((end - first) / kGranuleBytes);
  for (Addr g = first; g < end; g += kGranuleBytes) out.push_back(Granule{g});
  return out;
}

TaggedMemory::TaggedMemory(const TaggedMemory& other) { *this = other; }

TaggedMemory& TaggedMemory::operator=(const TaggedMemory& other) {
  if (this == &other) return *this;
  pages_.clear();
  pages_.reserve(other.pages_.size());
  for (const auto& [base, page] : other.pages_) pages_.emplace(base, std::make_unique<Page>(*page));
  return *this;
}

void TaggedMemory::map(Addr base, std::uint64_t len, PageAttrs attrs) {
  if (len == 0) return;
  const Addr end = align_up(base + len, kPageBytes);
  for (Addr p = align_down(base, kPageBytes); p < end; p += kPageBytes) {
    auto& slot = pages_[p];
    if (!slot) slot = std::make_unique<Page>();
    slot->attrs = attrs;
  }
}

const TaggedMemory::Page* TaggedMemory::find(Addr addr) const {
  auto it = pages_.find(align_down(addr, kPageBytes));
  return it == pages_.end() ? nullptr : it->second.get();
}

const TaggedMemory::Page& TaggedMemory::page_at(Addr addr) const {
  const Page* p = find(addr);
  if (p == nullptr) {
    std::ostringstream os;
    os << "address 0x" << std::hex << addr << " is not mapped";
    throw SimError(ErrorKind::kUnmapped, os.str());
  }
  return *p;
}

TaggedMemory::Page& TaggedMemory::page_at(Addr addr) {
  return const_cast<Page&>(std::as_const(*this).page_at(addr));
}

bool TaggedMemory::is_mapped(Addr addr) const { return find(addr) != nullptr; }

PageAttrs TaggedMemory::attrs(Addr addr) const { return page_at(addr).attrs; }

namespace {

void check_granule(Granule g) {
  if (!is_aligned(g.base, kGranuleBytes)) {
    std::ostringstream os;
    os << "granule base 0x" << std::hex << g.base << " is not 16-byte aligned";
    throw SimError(ErrorKind::kUnalignedGranule, os.str());
  }
}

}  // namespace

void TaggedMemory::set_tag(Granule g, Tag tag) {
  check_granule(g);
  Page& p = page_at(g.base);
  if (!p.attrs.taggable) {
    std::ostringstream os;
    os << "page of 0x" << std::hex << g.base << " does not allow tagging";
    throw SimError(ErrorKind::kNotTaggable, os.str());
  }
  p.tags[(g.base % kPageBytes) / kGranuleBytes] = static_cast<std::uint8_t>(tag.value());
}

Tag TaggedMemory::get_tag(Granule g) const {
  check_granule(g);
  const Page& p = page_at(g.base);
  if (!p.attrs.taggable) {
    std::ostringstream os;
    os << "page of 0x" << std::hex << g.base << " does not allow tagging";
    throw SimError(ErrorKind::kNotTaggable, os.str());
  }
  return Tag(p.tags[(g.base % kPageBytes) / kGranuleBytes]);
}

void TaggedMemory::read(Addr addr, std::span<std::uint8_t> out) const {
  std::size_t done = 0;
  while (done < out.size()) {
    const Addr a = addr + done;
    const Page& p = page_at(a);
    const std::size_t off = a % kPageBytes;
    const std::size_t n = std::min<std::size_t>(out.size() - done, kPageBytes - off);
    std::memcpy(out.data() + done, p.data.data() + off, n);
    done += n;
  }
}

void TaggedMemory::write(Addr addr, std::span<const std::uint8_t> in) {
  std::size_t done = 0;
  while (done < in.size()) {
    const Addr a = addr + done;
    Page& p = page_at(a);
    const std::size_t off = a % kPageBytes;
    const std::size_t n = std::min<std::size_t>(in.size() - done, kPageBytes - off);
    std::memcpy(p.data.data() + off, in.data() + done, n);
    done += n;
  }
}

void TaggedMemory::fill(Addr addr, std::uint64_t len, std::uint8_t byte) {
  std::uint64_t done = 0;
  while (done < len) {
    const Addr a = addr + done;
    Page& p = page_at(a);
    const std::size_t off = a % kPageBytes;
    const std::size_t n = std::min<std::uint64_t>(len - done, kPageBytes - off);
    std::memset(p.data.data() + off, byte, n);
    done += n;
  }
}

std::uint64_t TaggedMemory::read_u64(Addr addr) const {
  std::array<std::uint8_t, 8> b{};
  read(addr, b);
  std::uint64_t v = 0;
  std::memcpy(&v, b.data(), 8);
  return v;
}

void TaggedMemory::write_u64(Addr addr, std::uint64_t value) {
  std::array<std::uint8_t, 8> b{};
  std::memcpy(b.data(), &value, 8);
  write(addr, b);
}

void TaggedMemory::export_snapshot(std::ostream& os) const {
  std::vector<Addr> bases;
  bases.reserve(pages_.size());
  for (const auto& [base, page] : pages_) bases.push_back(base);
  std::sort(bases.begin(), bases.end());
  const auto flags = os.flags();
  os << std::hex;
  for (Addr base : bases) {
    const Page& p = *pages_.at(base);
    if (!p.attrs.taggable) continue;
    for (std::size_t i = 0; i < kGranulesPerPage; ++i) {
      if (p.tags[i] != 0) os << (base + i * kGranuleBytes) << ' ' << unsigned{p.tags[i]} << '\n';
    }
  }
  os.flags(flags);
}

std::string TaggedMemory::snapshot() const {
  std::ostringstream os;
  export_snapshot(os);
  return os.str();
}

bool operator==(const TaggedMemory& a, const TaggedMemory& b) {
  if (a.pages_.size() != b.pages_.size()) return false;
  for (const auto& [base, page] : a.pages_) {
    auto it = b.pages_.find(base);
    if (it == b.pages_.end()) return false;
    const auto& other = *it->second;
    if (page->attrs.taggable != other.attrs.taggable || page->attrs.kernel != other.attrs.kernel) return false;
    if (page->data != other.data || page->tags != other.tags) return false;
  }
  return true;
}

}  // namespace mtesim
