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

#include "arcsim/config/config.hpp"
#include "arcsim/metrics/report.hpp"
#include "arcsim/workload/rng.hpp"

#include <algorithm>

using namespace arcsim;
using namespace arcsim::metrics;

namespace {

cores::RunResult synthetic(std::uint64_t requests, std::uint64_t sim_ps) {
  cores::RunResult r;
  r.mode = cores::Mode::Baseline;
  r.service = "memcached";
  r.preset = "memc_mid";
  r.seed = 1;
  r.requests = requests;
  r.nic.injected = requests;
  r.nic.completed = requests;
  r.sim_time = kern::SimTime{sim_ps};
  r.end_time = r.sim_time;
  r.quiescent = true;
  r.cpu_freq_hz = 4'000'000'000;
  r.accel_freq_hz = 1'000'000'000;
  r.latencies_ps.assign(requests, 1000);
  cores::CoreStats c;
  c.role = "baseline";
  c.io = 10;
  c.busy_cycles = 10;
  r.cores.push_back(c);
  return r;
}

StatsReport run(std::vector<config::Assignment> a) {
  const auto c = config::build(a);
  return finalize(cores::simulate(c.sim), config::fingerprint(c));
}

}  // namespace

TEST_CASE("throughput is completions over simulated seconds") {
  const auto rep = finalize(synthetic(10'000, 40'000'000'000ULL), "f");  // 0.04 s
  CHECK(rep.throughput_rps == doctest::Approx(250'000.0));
  CHECK(rep.requests_completed == 10'000);
}

TEST_CASE("zero request run reports zero throughput and empty percentiles") {
  auto r = synthetic(0, 0);
  const auto rep = finalize(r, "f");
  CHECK(rep.throughput_rps == 0.0);
  CHECK(rep.latency.empty);
  CHECK(rep.to_kv().find("latency.empty=true") != std::string::npos);
}

TEST_CASE("nearest rank percentiles") {
  std::vector<std::uint64_t> v;
  for (std::uint64_t i = 1; i <= 100; ++i) v.push_back(i * 1000);  // 1..100 ns
  std::reverse(v.begin(), v.end());
  const auto p = percentiles(v);
  CHECK_FALSE(p.empty);
  CHECK(p.p50_ns == 50.0);
  CHECK(p.p95_ns == 95.0);
  CHECK(p.p99_ns == 99.0);
  const auto one = percentiles({7000});
  CHECK(one.p50_ns == 7.0);
  CHECK(one.p99_ns == 7.0);
  CHECK(percentiles({}).empty);
  // rank ceil(0.5 * 3) = 2
  CHECK(percentiles({3000, 1000, 2000}).p50_ns == 2.0);
}

TEST_CASE("percentiles are monotone on random samples") {
  workload::SplitMix64 rng(3);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::uint64_t> v(1 + rng.below(500));
    for (auto& x : v) x = rng.below(10'000'000);
    const auto p = percentiles(v);
    CHECK(p.p50_ns <= p.p95_ns);
    CHECK(p.p95_ns <= p.p99_ns);
    CHECK(p.p99_ns * 1000 <= static_cast<double>(*std::max_element(v.begin(), v.end())));
  }
}

TEST_CASE("conservation violations are fatal") {
  auto r = synthetic(100, 1'000'000);
  r.nic.completed = 99;
  CHECK_THROWS_AS(finalize(r, "f"), ConservationViolation);
  r = synthetic(100, 1'000'000);
  r.nic.completed = 98;
  r.nic.drops = 1;
  r.nic.errors = 1;
  CHECK_NOTHROW(finalize(r, "f"));
  r = synthetic(100, 1'000'000);
  r.accel_in_flight = 1;
  CHECK_THROWS_AS(finalize(r, "f"), ConservationViolation);
  r = synthetic(100, 1'000'000);
  r.buffer_residue = 64;
  CHECK_THROWS_AS(finalize(r, "f"), ConservationViolation);
  r = synthetic(100, 1'000'000);
  r.cores[0].busy_cycles = 11;  // stages no longer add up
  CHECK_THROWS(finalize(r, "f"));
}

TEST_CASE("speedup arithmetic and self comparison") {
  auto b = finalize(synthetic(1000, 400'000'000'000ULL), "b");  // 0.4 s
  auto a = finalize(synthetic(1000, 100'000'000'000ULL), "a");  // 0.1 s
  const auto c = compare(b, a);
  CHECK(c.speedup == doctest::Approx(4.0));
  CHECK(c.throughput_ratio == doctest::Approx(4.0));
  const auto self = compare(b, b);
  CHECK(self.speedup == 1.0);
  CHECK(self.instruction_reduction == 0.0);
  CHECK(self.cycle_reduction == 0.0);
  CHECK(self.codec_byte_reduction == 0.0);
}

TEST_CASE("mismatched runs are refused") {
  const auto b = finalize(synthetic(1000, 1'000'000), "b");
  auto other = synthetic(1000, 1'000'000);
  other.seed = 2;
  CHECK_THROWS_AS(compare(b, finalize(other, "x")), MismatchedRuns);
  other = synthetic(1000, 1'000'000);
  other.preset = "memc_low";
  CHECK_THROWS_AS(compare(b, finalize(other, "x")), MismatchedRuns);
  CHECK_THROWS_AS(compare(b, finalize(synthetic(999, 1'000'000), "x")), MismatchedRuns);
}

TEST_CASE("simulated memc_mid pair") {
  const auto b = run({{"mode", "baseline"}, {"workload.requests", "20000"}});
  const auto a = run({{"workload.requests", "20000"}});
  CHECK(a.deser_fraction() >= 0.59);
  CHECK(a.deser_fraction() <= 0.74);
  CHECK(a.rx_share() > 0.5);
  CHECK(a.rx.stage_sum() <= a.rx.busy_cycles);
  CHECK(a.tx.stage_sum() <= a.tx.busy_cycles);
  CHECK(a.fsm_legal);
  CHECK(a.simultaneous_busy > 0);
  CHECK(a.throughput_rps == doctest::Approx(2e4 / (static_cast<double>(a.sim_time_ps) * 1e-12)));
  for (const auto& act : a.actors) CHECK(act.stage_sum() == act.busy_cycles);
  const auto c = compare(b, a);
  CHECK(c.speedup > 1.0);
  CHECK(c.codec_byte_reduction == 1.0);  // no host core touches wire bytes
  CHECK(c.instruction_reduction > 0.0);
  CHECK(b.fingerprint != a.fingerprint);
}

TEST_CASE("serialized reports are deterministic and carry provenance") {
  const std::vector<config::Assignment> cfg = {{"preset", "post_low"}, {"workload.requests", "1500"}};
  const auto x = run(cfg);
  const auto y = run(cfg);
  CHECK(x.to_kv() == y.to_kv());
  CHECK(x.csv_row() == y.csv_row());
  const auto kv = x.to_kv();
  CHECK(kv.find("tool=") == 0);
  CHECK(kv.find("version=") != std::string::npos);
  CHECK(kv.find("fingerprint=" + x.fingerprint) != std::string::npos);
  CHECK(kv.find("prng=splitmix64") != std::string::npos);
  CHECK(kv.back() == '\n');
  // Header and row have the same number of columns.
  const auto cols = [](const std::string& s) { return std::count(s.begin(), s.end(), ',') + 1; };
  CHECK(cols(StatsReport::csv_header()) == cols(x.csv_row()));
  CHECK(cols(ComparisonReport::csv_header()) == cols(compare(x, x).csv_row()));
}

TEST_CASE("fixed precision formatting") {
  CHECK(fmt(1.0) == "1.000000");
  CHECK(fmt(0.1234567) == "0.123457");
  CHECK(fmt(250000) == "250000.000000");
}
