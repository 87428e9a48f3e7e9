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

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>

using namespace arcsim;
using namespace arcsim::config;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("assignments parse with comments and whitespace") {
  const auto a = parse_assignments("# profile\n\n  latency.dram_ns = 120 # slow\nmode=baseline\r\n");
  REQUIRE(a.size() == 2);
  CHECK(a[0] == Assignment{"latency.dram_ns", "120"});
  CHECK(a[1] == Assignment{"mode", "baseline"});
}

TEST_CASE("syntax errors carry origin and line number") {
  CHECK(error_of([] { parse_assignments("mode = arcalis\nnot an assignment\n", "x.cfg"); }) ==
        "x.cfg:2: expected 'key = value'");
  CHECK(error_of([] { parse_assignments("\n\n = 3\n", "y.cfg"); }) == "y.cfg:3: empty key");
  CHECK(error_of([] { parse_assignments("latency.dram = 1\n", "z.cfg"); }) == "z.cfg:1: unknown key 'latency.dram'");
}

TEST_CASE("unknown keys and malformed values are rejected") {
  RunConfig c;
  CHECK_THROWS_AS(set(c, "latency.nope", "1"), ConfigError);
  CHECK_THROWS_AS(get(c, "latency.nope"), ConfigError);
  CHECK_THROWS_AS(set(c, "latency.dram_ns", "fast"), ConfigError);
  CHECK_THROWS_AS(set(c, "latency.dram_ns", "12x"), ConfigError);
  CHECK_THROWS_AS(set(c, "memory.premap_buffers", "maybe"), ConfigError);
  CHECK_THROWS_AS(set(c, "workload.requests", "-1"), ConfigError);
  CHECK_THROWS_AS(set(c, "workload.ops", "SET"), ConfigError);
  CHECK_THROWS_AS(set(c, "mode", "turbo"), ConfigError);
  CHECK_THROWS_AS(set(c, "preset", "memc_huge"), std::exception);
  CHECK_THROWS_AS(build({{"load.mode", "sometimes"}}), ConfigError);
}

TEST_CASE("every key round trips through get and set") {
  const auto base = build({});
  for (const auto& k : keys()) {
    RunConfig c = base;
    const auto v = get(c, k.name);
    CHECK_NOTHROW(set(c, k.name, v));
    CHECK(get(c, k.name) == v);
    CHECK_FALSE(k.doc.empty());
  }
  CHECK(fingerprint(base) == fingerprint(build({})));
}

TEST_CASE("keys are sorted and canonical output follows them") {
  const auto& ks = keys();
  CHECK(std::is_sorted(ks.begin(), ks.end(), [](const auto& a, const auto& b) { return a.name < b.name; }));
  const auto text = canonical(build({}));
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  CHECK(std::is_sorted(lines.begin(), lines.end()));
  CHECK(text.find("calibration=") == std::string::npos);
  CHECK(text.find("output.report=") == std::string::npos);
  CHECK(text.find("mode=arcalis\n") != std::string::npos);
  CHECK(text.find("preset=memc_mid\n") != std::string::npos);
}

TEST_CASE("fingerprint is stable and sensitive") {
  const auto f = fingerprint(build({}));
  CHECK(f.size() == 16);
  CHECK(f.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(fingerprint(build({{"latency.dram_ns", "91"}})) != f);
  CHECK(fingerprint(build({{"workload.seed", "2"}})) != f);
  CHECK(fingerprint(build({{"mode", "baseline"}})) != f);
  // Output paths do not change what is simulated.
  CHECK(fingerprint(build({{"output.report", "r.txt"}, {"output.trace", "t.txt"}})) == f);
  // Setting a value to what it already is changes nothing.
  CHECK(fingerprint(build({{"latency.dram_ns", get(build({}), "latency.dram_ns")}})) == f);
}

TEST_CASE("layering: profile, then preset, then explicit assignments") {
  const auto none = build({{"calibration", "none"}});
  const auto def = build({});
  CHECK(get(none, "memory.cpu_mlp") == "1");
  CHECK(get(def, "memory.cpu_mlp") == "8");
  CHECK(fingerprint(none) != fingerprint(def));

  // preset applies regardless of where it appears, explicit keys win over it
  const auto a = build({{"workload.value_size", "512"}, {"preset", "memc_tiny"}});
  CHECK(get(a, "preset") == "memc_tiny");
  CHECK(get(a, "workload.key_size") == "8");
  CHECK(get(a, "workload.value_size") == "512");
  const auto b = build({{"preset", "post_low"}});
  CHECK(get(b, "workload.service") == "post_storage");
  CHECK(get(b, "workload.ops").find("StorePost:0.1") != std::string::npos);

  // later assignments win
  const auto c = build({{"latency.dram_ns", "70"}, {"latency.dram_ns", "75"}});
  CHECK(get(c, "latency.dram_ns") == "75");
}

TEST_CASE("calibration files are loaded and restricted") {
  const std::string ok = "calib_ok.tmp", bad = "calib_bad.tmp", worse = "calib_worse.tmp";
  std::ofstream(ok) << "latency.dram_ns = 123\nmemory.cpu_mlp = 4\n";
  std::ofstream(bad) << "# tries to pick the workload\npreset = memc_low\n";
  std::ofstream(worse) << "mode = baseline\n";
  const auto c = build({{"calibration", ok}});
  CHECK(get(c, "latency.dram_ns") == "123");
  CHECK(get(c, "memory.cpu_mlp") == "4");
  CHECK(get(build({{"calibration", ok}, {"latency.dram_ns", "99"}}), "latency.dram_ns") == "99");
  CHECK(error_of([&] { build({{"calibration", bad}}); }) == "calibration profile may not set 'preset'");
  CHECK(error_of([&] { build({{"calibration", worse}}); }) == "calibration profile may not set 'mode'");
  CHECK_THROWS_AS(build({{"calibration", "/nonexistent/profile"}}), ConfigError);
  std::remove(ok.c_str());
  std::remove(bad.c_str());
  std::remove(worse.c_str());
}

TEST_CASE("shipped profile parses and only holds model keys") {
  const auto a = parse_assignments(default_calibration(), "default");
  CHECK(a.size() > 20);
  for (const auto& [k, v] : a) {
    CHECK(k.rfind("workload.", 0) != 0);
    CHECK(k != "preset");
    CHECK(k != "mode");
  }
}
