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

#include "arcsim/simkern/time.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace arcsim::kern {

/// Raised on internal model inconsistencies (past events, illegal FSM edges,
/// broken conservation). Always a simulator bug, never a workload property.
class SimulationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

using ActorId = std::uint32_t;

struct SimEvent {
  SimTime fire_at;
  std::uint64_t seq = 0;
  ActorId target = 0;
  std::uint32_t kind = 0;
  std::uint64_t arg0 = 0;
  std::uint64_t arg1 = 0;

  /// Strict (fire_at, seq) order; seq is unique per kernel.
  friend bool operator<(const SimEvent& a, const SimEvent& b) {
    if (a.fire_at != b.fire_at) return a.fire_at < b.fire_at;
    return a.seq < b.seq;
  }
};

class Kernel;

class Actor {
 public:
  virtual ~Actor() = default;
  virtual void handle(Kernel& kernel, const SimEvent& event) = 0;
  /// An idle actor has no self-driven work pending outside the event queue.
  virtual bool idle() const { return true; }
  virtual std::string_view name() const = 0;
  virtual std::string_view kind_name(std::uint32_t kind) const;
};

struct TraceRecord {
  SimTime time;
  ActorId actor;
  std::uint32_t kind;
};

class Kernel {
 public:
  Kernel() = default;
  Kernel(const Kernel&) = delete;
  Kernel& operator=(const Kernel&) = delete;

  ActorId register_actor(Actor& actor);

  /// Enqueues an event; returns the insertion sequence number.
  std::uint64_t schedule(SimTime fire_at, ActorId target, std::uint32_t kind,
                         std::uint64_t arg0 = 0, std::uint64_t arg1 = 0);
  std::uint64_t schedule_in(SimTime delay, ActorId target, std::uint32_t kind,
                            std::uint64_t arg0 = 0, std::uint64_t arg1 = 0) {
    return schedule(now_ + delay, target, kind, arg0, arg1);
  }

  /// Processes events in (fire_at, seq) order. With a limit, stops before
  /// the first event later than it; without one, runs to quiescence.
  /// Returns the time of the last processed event.
  SimTime run_until(std::optional<SimTime> limit = std::nullopt);

  SimTime now() const { return now_; }
  bool quiescent() const;
  std::uint64_t events_processed() const { return processed_; }
  std::size_t pending() const { return queue_.size(); }

  void enable_trace(bool on) { tracing_ = on; }
  const std::vector<TraceRecord>& trace() const { return trace_; }
  /// `time_ps,actor,kind` lines, one per processed event.
  std::string trace_text() const;

  const Actor& actor(ActorId id) const { return *actors_.at(id); }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const { return b < a; }
  };

  std::vector<Actor*> actors_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;
  SimTime now_;
  SimTime last_processed_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t processed_ = 0;
  bool tracing_ = false;
  std::vector<TraceRecord> trace_;
};

}  // namespace arcsim::kern
