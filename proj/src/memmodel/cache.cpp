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

#include "arcsim/memmodel/cache.hpp"

#include <stdexcept>

namespace arcsim::mem {

SetAssocCache::SetAssocCache(std::string name, std::size_t capacity_bytes, std::size_t associativity,
                             std::size_t line_bytes)
    : name_(std::move(name)), assoc_(associativity), line_bytes_(line_bytes) {
  if (associativity == 0 || line_bytes == 0 || capacity_bytes % (associativity * line_bytes) != 0 ||
      capacity_bytes == 0) {
    throw std::invalid_argument(name_ + ": capacity must be a positive multiple of associativity x line size");
  }
  sets_ = capacity_bytes / (associativity * line_bytes);
  tags_.assign(sets_ * assoc_, 0);
  stamps_.assign(sets_ * assoc_, 0);
}

std::size_t SetAssocCache::find_way(std::size_t set, std::uint64_t line) const {
  const std::uint64_t tag = line + 1;
  const std::size_t base = set * assoc_;
  for (std::size_t w = 0; w < assoc_; ++w) {
    if (tags_[base + w] == tag) return w;
  }
  return assoc_;
}

bool SetAssocCache::contains(std::uint64_t line) const { return find_way(line % sets_, line) != assoc_; }

bool SetAssocCache::touch(std::uint64_t line) {
  const std::size_t set = line % sets_;
  const std::size_t w = find_way(set, line);
  if (w == assoc_) return false;
  stamps_[set * assoc_ + w] = ++clock_;
  return true;
}

std::optional<std::uint64_t> SetAssocCache::insert(std::uint64_t line) {
  const std::size_t set = line % sets_;
  const std::size_t base = set * assoc_;
  if (const std::size_t w = find_way(set, line); w != assoc_) {
    stamps_[base + w] = ++clock_;
    return std::nullopt;
  }
  std::size_t victim = 0;
  for (std::size_t w = 0; w < assoc_; ++w) {
    if (tags_[base + w] == 0) {
      victim = w;
      break;
    }
    if (stamps_[base + w] < stamps_[base + victim]) victim = w;
  }
  std::optional<std::uint64_t> evicted;
  if (tags_[base + victim] != 0) evicted = tags_[base + victim] - 1;
  tags_[base + victim] = line + 1;
  stamps_[base + victim] = ++clock_;
  return evicted;
}

bool SetAssocCache::invalidate(std::uint64_t line) {
  const std::size_t set = line % sets_;
  const std::size_t w = find_way(set, line);
  if (w == assoc_) return false;
  tags_[set * assoc_ + w] = 0;
  stamps_[set * assoc_ + w] = 0;
  return true;
}

std::size_t SetAssocCache::resident_lines() const {
  std::size_t n = 0;
  for (auto t : tags_) n += (t != 0);
  return n;
}

}  // namespace arcsim::mem
