/*
 * Copyright 2026 The arcsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace arcsim::mem {

inline constexpr std::uint64_t kPage4K = 4096;
inline constexpr std::uint64_t kPage2M = 2 * 1024 * 1024;

struct Mapping {
  std::uint64_t vbase = 0;
  std::uint64_t pbase = 0;
  std::uint64_t page_bytes = kPage4K;

  std::uint64_t translate(std::uint64_t vaddr) const { return pbase + (vaddr - vbase); }
};

/// Virtual-to-physical map with 4 KiB and 2 MiB pages. Physical frames are
/// handed out by a bump allocator in mapping order.
class PageTable {
 public:
  std::optional<Mapping> lookup(std::uint64_t vaddr) const;
  /// Maps the page containing `vaddr` if it is not mapped yet.
  Mapping map(std::uint64_t vaddr, std::uint64_t page_bytes);
  void map_range(std::uint64_t vaddr, std::uint64_t bytes, std::uint64_t page_bytes);
  bool unmap(std::uint64_t vaddr);
  std::size_t mapped_pages() const { return small_.size() + huge_.size(); }

 private:
  std::unordered_map<std::uint64_t, std::uint64_t> small_;  // vpn(4K) -> pbase
  std::unordered_map<std::uint64_t, std::uint64_t> huge_;   // vpn(2M) -> pbase
  std::uint64_t next_phys_ = 0x1'0000'0000ULL;
};

/// Fully associative LRU translation cache.
class Tlb {
 public:
  explicit Tlb(std::size_t entries);

  std::optional<Mapping> lookup(std::uint64_t vaddr);
  void insert(const Mapping& m);
  void invalidate(std::uint64_t vaddr);
  void flush();
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }

 private:
  struct Entry {
    Mapping mapping;
    std::uint64_t stamp;
  };
  std::size_t capacity_;
  std::uint64_t clock_ = 0;
  std::vector<Entry> entries_;
};

}  // namespace arcsim::mem
