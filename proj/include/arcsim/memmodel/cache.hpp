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
#include <string>
#include <vector>

namespace arcsim::mem {

inline constexpr std::size_t kLineBytes = 64;

constexpr std::uint64_t line_of(std::uint64_t addr) { return addr / kLineBytes; }

/// Number of cache lines touched by [addr, addr+size).
constexpr std::size_t lines_spanned(std::uint64_t addr, std::size_t size) {
  if (size == 0) return 0;
  return static_cast<std::size_t>(line_of(addr + size - 1) - line_of(addr) + 1);
}

/// Set-associative tag store with true LRU replacement. Holds line
/// addresses only; no data.
class SetAssocCache {
 public:
  SetAssocCache(std::string name, std::size_t capacity_bytes, std::size_t associativity,
                std::size_t line_bytes = kLineBytes);

  const std::string& name() const { return name_; }
  std::size_t capacity_bytes() const { return sets_ * assoc_ * line_bytes_; }
  std::size_t sets() const { return sets_; }
  std::size_t associativity() const { return assoc_; }
  std::size_t line_bytes() const { return line_bytes_; }

  bool contains(std::uint64_t line) const;
  /// Lookup that refreshes LRU on a hit.
  bool touch(std::uint64_t line);
  /// Installs `line` (no-op refresh if present); returns the evicted line.
  std::optional<std::uint64_t> insert(std::uint64_t line);
  bool invalidate(std::uint64_t line);
  std::size_t resident_lines() const;

 private:
  std::size_t find_way(std::size_t set, std::uint64_t line) const;

  std::string name_;
  std::size_t sets_;
  std::size_t assoc_;
  std::size_t line_bytes_;
  std::uint64_t clock_ = 0;
  // tag = line + 1; 0 marks an empty way.
  std::vector<std::uint64_t> tags_;
  std::vector<std::uint64_t> stamps_;
};

}  // namespace arcsim::mem
