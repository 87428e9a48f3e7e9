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

#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace arcsim::kern {

/// Simulated time in integer picoseconds.
struct SimTime {
  std::uint64_t ps = 0;

  constexpr SimTime() = default;
  constexpr explicit SimTime(std::uint64_t picoseconds) : ps(picoseconds) {}

  static constexpr SimTime from_ns(std::uint64_t ns) { return SimTime{ns * 1000}; }
  static constexpr SimTime max() { return SimTime{std::numeric_limits<std::uint64_t>::max()}; }

  constexpr double seconds() const { return static_cast<double>(ps) * 1e-12; }
  constexpr double ns() const { return static_cast<double>(ps) * 1e-3; }

  constexpr auto operator<=>(const SimTime&) const = default;
  constexpr SimTime& operator+=(SimTime o) {
    ps += o.ps;
    return *this;
  }
  friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime{a.ps + b.ps}; }
  friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime{a.ps - b.ps}; }
};

inline constexpr std::uint64_t kPicosPerSecond = 1'000'000'000'000ULL;

/// A clock with an integer frequency. Conversions to time round up so an
/// operation never finishes earlier than its cycle count allows.
class ClockDomain {
 public:
  ClockDomain(std::string name, std::uint64_t frequency_hz);

  const std::string& name() const { return name_; }
  std::uint64_t frequency_hz() const { return frequency_hz_; }

  SimTime cycles_to_time(std::uint64_t cycles) const;
  /// Whole cycles needed to cover `t` (rounded up).
  std::uint64_t time_to_cycles_ceil(SimTime t) const;
  /// Whole cycles elapsed within `t` (rounded down).
  std::uint64_t time_to_cycles_floor(SimTime t) const;

 private:
  std::string name_;
  std::uint64_t frequency_hz_;
};

SimTime cycles_to_time(std::uint64_t cycles, const ClockDomain& domain);

}  // namespace arcsim::kern
