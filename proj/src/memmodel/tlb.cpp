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

#include "arcsim/memmodel/tlb.hpp"

#include <algorithm>
#include <stdexcept>

namespace arcsim::mem {

std::optional<Mapping> PageTable::lookup(std::uint64_t vaddr) const {
  if (const auto it = huge_.find(vaddr / kPage2M); it != huge_.end()) {
    return Mapping{vaddr / kPage2M * kPage2M, it->second, kPage2M};
  }
  if (const auto it = small_.find(vaddr / kPage4K); it != small_.end()) {
    return Mapping{vaddr / kPage4K * kPage4K, it->second, kPage4K};
  }
  return std::nullopt;
}

Mapping PageTable::map(std::uint64_t vaddr, std::uint64_t page_bytes) {
  if (page_bytes != kPage4K && page_bytes != kPage2M) throw std::invalid_argument("page size must be 4 KiB or 2 MiB");
  if (auto m = lookup(vaddr)) return *m;
  next_phys_ = (next_phys_ + page_bytes - 1) / page_bytes * page_bytes;
  const std::uint64_t pbase = next_phys_;
  next_phys_ += page_bytes;
  if (page_bytes == kPage2M) {
    huge_.emplace(vaddr / kPage2M, pbase);
  } else {
    small_.emplace(vaddr / kPage4K, pbase);
  }
  return Mapping{vaddr / page_bytes * page_bytes, pbase, page_bytes};
}

void PageTable::map_range(std::uint64_t vaddr, std::uint64_t bytes, std::uint64_t page_bytes) {
  for (std::uint64_t a = vaddr / page_bytes * page_bytes; a < vaddr + bytes; a += page_bytes) map(a, page_bytes);
}

bool PageTable::unmap(std::uint64_t vaddr) {
  return huge_.erase(vaddr / kPage2M) > 0 || small_.erase(vaddr / kPage4K) > 0;
}

Tlb::Tlb(std::size_t entries) : capacity_(entries) {
  if (entries == 0) throw std::invalid_argument("TLB needs at least one entry");
  entries_.reserve(entries);
}

std::optional<Mapping> Tlb::lookup(std::uint64_t vaddr) {
  for (auto& e : entries_) {
    if (vaddr >= e.mapping.vbase && vaddr < e.mapping.vbase + e.mapping.page_bytes) {
      e.stamp = ++clock_;
      return e.mapping;
    }
  }
  return std::nullopt;
}

void Tlb::insert(const Mapping& m) {
  for (auto& e : entries_) {
    if (e.mapping.vbase == m.vbase && e.mapping.page_bytes == m.page_bytes) {
      e = Entry{m, ++clock_};
      return;
    }
  }
  if (entries_.size() < capacity_) {
    entries_.push_back(Entry{m, ++clock_});
    return;
  }
  auto lru = std::min_element(entries_.begin(), entries_.end(),
                              [](const Entry& a, const Entry& b) { return a.stamp < b.stamp; });
  *lru = Entry{m, ++clock_};
}

void Tlb::invalidate(std::uint64_t vaddr) {
  std::erase_if(entries_, [vaddr](const Entry& e) {
    return vaddr >= e.mapping.vbase && vaddr < e.mapping.vbase + e.mapping.page_bytes;
  });
}

void Tlb::flush() { entries_.clear(); }

}  // namespace arcsim::mem
