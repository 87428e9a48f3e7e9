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

#include "doctest.h"

#include "arcsim/simkern/kernel.hpp"

#include <string>
#include <vector>

using namespace arcsim::kern;

namespace {

struct Recorder : Actor {
  std::string label;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> seen;  // (time_ps, kind)
  explicit Recorder(std::string l) : label(std::move(l)) {}
  void handle(Kernel& k, const SimEvent& e) override { seen.emplace_back(k.now().ps, e.kind); }
  std::string_view name() const override { return label; }
};

// Re-arms itself a fixed number of times with pseudo-random delays.
struct Chatter : Actor {
  ActorId self = 0;
  ActorId peer = 0;
  std::uint64_t x;
  int left;
  Chatter(std::uint64_t seed, int n) : x(seed), left(n) {}
  void handle(Kernel& k, const SimEvent& e) override {
    if (left-- <= 0) return;
    x = x * 6364136223846793005ULL + 1442695040888963407ULL;
    k.schedule_in(SimTime{(x >> 40) % 997}, (x >> 20) % 2 ? self : peer, e.kind + 1);
  }
  std::string_view name() const override { return "chatter"; }
};

}  // namespace

TEST_CASE("cycles_to_time rounds up") {
  ClockDomain cpu("cpu", 4'000'000'000ULL);
  ClockDomain accel("accel", 1'000'000'000ULL);
  CHECK(cycles_to_time(4, cpu).ps == 1000);
  CHECK(cycles_to_time(1, accel).ps == 1000);
  // 3 cycles at 250 ps each.
  CHECK(cycles_to_time(3, cpu).ps == 3 * 250);
  ClockDomain odd("odd", 3'000'000'000ULL);
  CHECK(odd.cycles_to_time(1).ps == 334);  // 333.33.. rounded up
  CHECK(odd.cycles_to_time(3).ps == 1000);
  CHECK(odd.time_to_cycles_ceil(SimTime{334}) == 2);
  CHECK(odd.time_to_cycles_floor(SimTime{334}) == 1);
  CHECK_THROWS(ClockDomain("zero", 0));
}

TEST_CASE("events fire in (time, seq) order") {
  Kernel k;
  Recorder a("a"), b("b");
  const ActorId ia = k.register_actor(a);
  const ActorId ib = k.register_actor(b);
  k.schedule(SimTime{100}, ia, 1);
  k.schedule(SimTime{50}, ia, 2);
  k.schedule(SimTime{100}, ib, 3);
  k.schedule(SimTime{100}, ia, 4);
  const SimTime end = k.run_until();
  CHECK(end.ps == 100);
  REQUIRE(a.seen.size() == 3);
  CHECK(a.seen[0] == std::make_pair<std::uint64_t, std::uint32_t>(50, 2));
  CHECK(a.seen[1].second == 1);
  CHECK(a.seen[2].second == 4);
  CHECK(k.trace().empty());
}

TEST_CASE("past events and unknown actors are rejected") {
  Kernel k;
  Recorder a("a");
  const ActorId ia = k.register_actor(a);
  k.schedule(SimTime{20}, ia, 1);
  k.run_until();
  CHECK(k.now().ps == 20);
  CHECK_THROWS_AS(k.schedule(SimTime{10}, ia, 1), SimulationError);
  CHECK_THROWS_AS(k.schedule(SimTime{30}, ia + 7, 1), SimulationError);
  CHECK_NOTHROW(k.schedule(SimTime{20}, ia, 1));
}

TEST_CASE("empty queue runs to time zero") {
  Kernel k;
  Recorder a("a");
  k.register_actor(a);
  CHECK(k.run_until().ps == 0);
  CHECK(k.quiescent());
}

TEST_CASE("run_until with a limit leaves later events queued") {
  Kernel k;
  Recorder a("a");
  const ActorId ia = k.register_actor(a);
  k.schedule(SimTime{500}, ia, 1);
  k.schedule(SimTime{900}, ia, 2);
  CHECK(k.run_until(SimTime{600}).ps == 500);
  CHECK(k.pending() == 1);
  CHECK(k.run_until().ps == 900);
}

TEST_CASE("trace replay is identical and monotone") {
  auto run = [] {
    Kernel k;
    k.enable_trace(true);
    Chatter c1(11, 400), c2(29, 400);
    c1.self = k.register_actor(c1);
    c2.self = k.register_actor(c2);
    c1.peer = c2.self;
    c2.peer = c1.self;
    k.schedule(SimTime{0}, c1.self, 0);
    k.schedule(SimTime{0}, c2.self, 0);
    k.run_until();
    std::uint64_t prev = 0;
    for (const auto& r : k.trace()) {
      CHECK(r.time.ps >= prev);
      prev = r.time.ps;
    }
    CHECK(k.trace().size() == k.events_processed());
    return k.trace_text();
  };
  const std::string first = run();
  CHECK(first == run());
  CHECK(first.rfind("0,chatter,event\n", 0) == 0);
}
