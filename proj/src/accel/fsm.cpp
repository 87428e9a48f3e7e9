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

#include "arcsim/accel/fsm.hpp"

#include <string>

namespace arcsim::accel {

std::string_view to_string(EngineState s) {
  switch (s) {
    case EngineState::IDLE_RECV: return "IDLE_RECV";
    case EngineState::BUSY: return "BUSY";
    case EngineState::DRAIN: return "DRAIN";
    case EngineState::DONE: return "DONE";
    case EngineState::IDLE_RESP: return "IDLE_RESP";
  }
  return "?";
}

std::string_view to_string(Trigger t) {
  switch (t) {
    case Trigger::valid_request: return "valid_request";
    case Trigger::work_done: return "work_done";
    case Trigger::mem_drained: return "mem_drained";
    case Trigger::cleanup_done: return "cleanup_done";
    case Trigger::more_work: return "more_work";
    case Trigger::no_work: return "no_work";
  }
  return "?";
}

IllegalTransition::IllegalTransition(EngineState from, Trigger trigger)
    : kern::SimulationError("illegal engine transition: " + std::string(to_string(from)) + " on " +
                            std::string(to_string(trigger))),
      from_(from),
      trigger_(trigger) {}

EngineState step_fsm(EngineState from, Trigger trigger, std::uint64_t in_flight) {
  using S = EngineState;
  switch (from) {
    case S::IDLE_RECV:
    case S::IDLE_RESP:
      if (trigger == Trigger::valid_request) return S::BUSY;
      break;
    case S::BUSY:
      if (trigger == Trigger::work_done) return in_flight > 0 ? S::DRAIN : S::DONE;
      break;
    case S::DRAIN:
      if (trigger == Trigger::mem_drained) return S::DONE;
      break;
    case S::DONE:
      if (trigger == Trigger::more_work) return S::IDLE_RESP;
      if (trigger == Trigger::no_work) return S::IDLE_RECV;
      break;
  }
  throw IllegalTransition(from, trigger);
}

bool is_legal_edge(EngineState from, EngineState to) {
  using S = EngineState;
  switch (from) {
    case S::IDLE_RECV:
    case S::IDLE_RESP: return to == S::BUSY;
    case S::BUSY: return to == S::DRAIN || to == S::DONE;
    case S::DRAIN: return to == S::DONE;
    case S::DONE: return to == S::IDLE_RESP || to == S::IDLE_RECV;
  }
  return false;
}

bool TransitionLog::subset_of_legal() const {
  for (std::size_t f = 0; f < kEngineStates; ++f) {
    for (std::size_t t = 0; t < kEngineStates; ++t) {
      if (counts_[f][t] != 0 && !is_legal_edge(static_cast<EngineState>(f), static_cast<EngineState>(t))) {
        return false;
      }
    }
  }
  return true;
}

void TransitionLog::merge(const TransitionLog& other) {
  for (std::size_t f = 0; f < kEngineStates; ++f) {
    for (std::size_t t = 0; t < kEngineStates; ++t) counts_[f][t] += other.counts_[f][t];
  }
}

}  // namespace arcsim::accel
