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

#include "arcsim/simkern/kernel.hpp"

#include <array>
#include <cstdint>
#include <string_view>

namespace arcsim::accel {

enum class EngineState : std::uint8_t { IDLE_RECV = 0, BUSY, DRAIN, DONE, IDLE_RESP };
inline constexpr std::size_t kEngineStates = 5;

enum class Trigger : std::uint8_t { valid_request, work_done, mem_drained, cleanup_done, more_work, no_work };

std::string_view to_string(EngineState s);
std::string_view to_string(Trigger t);

class IllegalTransition : public kern::SimulationError {
 public:
  IllegalTransition(EngineState from, Trigger trigger);
  EngineState from() const { return from_; }
  Trigger trigger() const { return trigger_; }

 private:
  EngineState from_;
  Trigger trigger_;
};

/// The engine transition function. `in_flight` only matters for work_done.
EngineState step_fsm(EngineState from, Trigger trigger, std::uint64_t in_flight);

bool is_legal_edge(EngineState from, EngineState to);

/// Counts observed transitions per (from, to) pair.
class TransitionLog {
 public:
  void record(EngineState from, EngineState to) {
    ++counts_[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)];
  }
  std::uint64_t count(EngineState from, EngineState to) const {
    return counts_[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)];
  }
  /// True when every observed edge is one step_fsm can produce.
  bool subset_of_legal() const;
  void merge(const TransitionLog& other);

 private:
  std::array<std::array<std::uint64_t, kEngineStates>, kEngineStates> counts_{};
};

}  // namespace arcsim::accel
