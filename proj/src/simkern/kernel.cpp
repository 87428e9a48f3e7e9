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

#include "arcsim/simkern/kernel.hpp"
#include "arcsim/simkern/time.hpp"

#include <sstream>

namespace arcsim::kern {

ClockDomain::ClockDomain(std::string name, std::uint64_t frequency_hz)
    : name_(std::move(name)), frequency_hz_(frequency_hz) {
  if (frequency_hz_ == 0) throw std::invalid_argument("clock domain '" + name_ + "' has zero frequency");
}

SimTime ClockDomain::cycles_to_time(std::uint64_t cycles) const {
  const unsigned __int128 num = static_cast<unsigned __int128>(cycles) * kPicosPerSecond;
  const unsigned __int128 ps = (num + frequency_hz_ - 1) / frequency_hz_;
  return SimTime{static_cast<std::uint64_t>(ps)};
}

std::uint64_t ClockDomain::time_to_cycles_ceil(SimTime t) const {
  const unsigned __int128 num = static_cast<unsigned __int128>(t.ps) * frequency_hz_;
  return static_cast<std::uint64_t>((num + kPicosPerSecond - 1) / kPicosPerSecond);
}

std::uint64_t ClockDomain::time_to_cycles_floor(SimTime t) const {
  const unsigned __int128 num = static_cast<unsigned __int128>(t.ps) * frequency_hz_;
  return static_cast<std::uint64_t>(num / kPicosPerSecond);
}

SimTime cycles_to_time(std::uint64_t cycles, const ClockDomain& domain) {
  return domain.cycles_to_time(cycles);
}

std::string_view Actor::kind_name(std::uint32_t) const { return "event"; }

ActorId Kernel::register_actor(Actor& actor) {
  actors_.push_back(&actor);
  return static_cast<ActorId>(actors_.size() - 1);
}

std::uint64_t Kernel::schedule(SimTime fire_at, ActorId target, std::uint32_t kind,
                               std::uint64_t arg0, std::uint64_t arg1) {
  if (fire_at < now_) {
    std::ostringstream msg;
    msg << "event scheduled in the past: fire_at=" << fire_at.ps << "ps now=" << now_.ps << "ps";
    throw SimulationError(msg.str());
  }
  if (target >= actors_.size()) throw SimulationError("event targets unknown actor");
  const std::uint64_t seq = next_seq_++;
  queue_.push(SimEvent{fire_at, seq, target, kind, arg0, arg1});
  return seq;
}

SimTime Kernel::run_until(std::optional<SimTime> limit) {
  while (!queue_.empty()) {
    const SimEvent ev = queue_.top();
    if (limit && ev.fire_at > *limit) break;
    queue_.pop();
    now_ = ev.fire_at;
    last_processed_ = ev.fire_at;
    ++processed_;
    if (tracing_) trace_.push_back(TraceRecord{ev.fire_at, ev.target, ev.kind});
    actors_[ev.target]->handle(*this, ev);
  }
  return last_processed_;
}

bool Kernel::quiescent() const {
  if (!queue_.empty()) return false;
  for (const Actor* a : actors_) {
    if (!a->idle()) return false;
  }
  return true;
}

std::string Kernel::trace_text() const {
  std::ostringstream out;
  for (const auto& r : trace_) {
    const Actor& a = *actors_[r.actor];
    out << r.time.ps << ',' << a.name() << ',' << a.kind_name(r.kind) << '\n';
  }
  return out.str();
}

}  // namespace arcsim::kern
