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

#include "arcsim/workload/rng.hpp"
#include "arcsim/workload/workload.hpp"
#include "arcsim/wirecodec/schema.hpp"

#include <cmath>
#include <map>

using namespace arcsim;
using namespace arcsim::workload;

namespace {

std::map<std::string, std::size_t> op_counts(const RequestTrace& t) {
  const auto& schema = wire::builtin_schema(t.service);
  std::map<std::string, std::size_t> out;
  for (const auto& e : t.entries) ++out[schema.find_method(e.message.method_id)->name];
  return out;
}

const std::string& str_field(const wire::RpcMessage& m, std::uint16_t id) {
  return std::get<std::string>(m.find(id)->value);
}

}  // namespace

TEST_CASE("presets match the published rows") {
  const std::vector<std::string> names = {"memc_low",  "memc_mid",  "memc_high", "memc_tiny", "memc_small",
                                          "post_low",  "post_mid",  "post_high", "unique_id"};
  auto got = preset_names();
  std::sort(got.begin(), got.end());
  auto want = names;
  std::sort(want.begin(), want.end());
  CHECK(got == want);
  CHECK(preset("memc_low").ratio_of("SET") == doctest::Approx(0.2));
  CHECK(preset("memc_low").ratio_of("GET") == doctest::Approx(0.8));
  CHECK(preset("memc_mid").ratio_of("SET") == doctest::Approx(0.5));
  CHECK(preset("memc_high").ratio_of("SET") == doctest::Approx(0.8));
  CHECK(preset("post_low").ratio_of("StorePost") == doctest::Approx(0.1));
  CHECK(preset("post_low").ratio_of("ReadPost") == doctest::Approx(0.5));
  CHECK(preset("post_low").ratio_of("ReadPosts") == doctest::Approx(0.4));
  CHECK(preset("post_high").ratio_of("StorePost") == doctest::Approx(0.9));
  CHECK(preset("post_high").ratio_of("ReadPost") == doctest::Approx(0.05));
  CHECK(preset("unique_id").ratio_of("ComposeUniqueId") == doctest::Approx(1.0));
  CHECK(preset("memc_tiny").key_size == 8);
  CHECK(preset("memc_tiny").value_size == 8);
  CHECK(preset("memc_small").key_size == 16);
  CHECK(preset("memc_small").value_size == 32);
  CHECK_THROWS_AS(preset("memc_huge"), InvalidMix);
}

TEST_CASE("invalid mixes are rejected") {
  auto m = preset("memc_mid");
  m.ops = {{"SET", 0.5}, {"GET", 0.4}};
  CHECK_THROWS_AS(m.validate(), InvalidMix);
  CHECK_THROWS_AS(generate(m), InvalidMix);
  m.ops = {{"SET", 0.5}, {"DELETE", 0.5}};
  CHECK_THROWS_AS(m.validate(), InvalidMix);
  m = preset("memc_mid");
  m.request_count = 0;
  CHECK_THROWS_AS(m.validate(), InvalidMix);
  m = preset("memc_mid");
  m.ops = {{"SET", 0.3}, {"GET", 0.7 + 1e-12}};
  CHECK_NOTHROW(m.validate());
}

TEST_CASE("memc_high draws SET 80% of the time") {
  auto m = preset("memc_high");
  m.request_count = 100'000;
  const auto t = generate(m);
  REQUIRE(t.entries.size() == 100'000);
  const auto c = op_counts(t);
  const double set = static_cast<double>(c.at("SET")) / 100'000.0;
  CHECK(std::fabs(set - 0.80) <= 0.01);
}

TEST_CASE("op fractions converge for every preset") {
  for (const auto& name : preset_names()) {
    auto m = preset(name);
    m.request_count = 100'000;
    const auto t = generate(m);
    const auto c = op_counts(t);
    for (const auto& op : m.ops) {
      const double got = c.count(op.method) ? static_cast<double>(c.at(op.method)) / 1e5 : 0.0;
      CHECK_MESSAGE(std::fabs(got - op.ratio) <= 0.01, name, " ", op.method);
    }
  }
}

TEST_CASE("unique_id requests have empty bodies") {
  auto m = preset("unique_id");
  m.request_count = 1000;
  const auto t = generate(m);
  const auto& schema = wire::builtin_schema("unique_id");
  for (const auto& e : t.entries) {
    CHECK(e.message.method_id == schema.find_method("ComposeUniqueId")->id);
    CHECK(e.message.fields.empty());
    CHECK(wire::body_size(e.message) == 1);  // STOP only
  }
}

TEST_CASE("zipf rank 1 frequency matches the harmonic oracle") {
  const std::uint64_t n = 1000;
  const double s = 0.99;
  double h = 0;
  for (std::uint64_t k = 1; k <= n; ++k) h += std::pow(static_cast<double>(k), -s);
  const double p1 = 1.0 / h;

  ZipfSampler z(n, s);
  CHECK(z.probability(1) == doctest::Approx(p1).epsilon(1e-9));
  SplitMix64 rng(2024);
  std::uint64_t hits = 0;
  const std::uint64_t draws = 1'000'000;
  for (std::uint64_t i = 0; i < draws; ++i) {
    const auto r = z.sample(rng.uniform());
    REQUIRE(r >= 1);
    REQUIRE(r <= n);
    if (r == 1) ++hits;
  }
  const double freq = static_cast<double>(hits) / static_cast<double>(draws);
  CHECK(std::fabs(freq / p1 - 1.0) <= 0.02);
}

TEST_CASE("zipf with s = 0 is uniform and boundaries are inclusive") {
  ZipfSampler z(4, 0.0);
  for (std::uint64_t k = 1; k <= 4; ++k) CHECK(z.probability(k) == doctest::Approx(0.25));
  CHECK(z.sample(0.0) == 1);
  CHECK(z.sample(std::nextafter(1.0, 0.0)) == 4);
}

TEST_CASE("size classes hold for every request") {
  for (const char* name : {"memc_tiny", "memc_small", "memc_mid"}) {
    auto m = preset(name);
    m.request_count = 5000;
    const auto t = generate(m);
    const auto& schema = wire::builtin_schema("memcached");
    const auto set_id = schema.find_method("SET")->id;
    for (const auto& e : t.entries) {
      CHECK(str_field(e.message, 1).size() == m.key_size);
      if (e.message.method_id == set_id) CHECK(str_field(e.message, 2).size() == m.value_size);
    }
  }
}

TEST_CASE("post storage shapes") {
  auto m = preset("post_mid");
  m.request_count = 3000;
  const auto t = generate(m);
  const auto& schema = wire::builtin_schema("post_storage");
  for (const auto& e : t.entries) {
    const auto& name = schema.find_method(e.message.method_id)->name;
    if (name == "StorePost") CHECK(str_field(e.message, 4).size() == m.text_size);
    if (name == "ReadPosts") {
      const auto& l = std::get<wire::ListValue>(e.message.find(2)->value);
      CHECK(l.items.size() == m.posts_per_read);
    }
  }
}

TEST_CASE("generation is a pure function of mix and seed") {
  auto m = preset("post_low");
  m.request_count = 2000;
  const auto a = generate(m);
  const auto b = generate(m);
  REQUIRE(a.entries.size() == b.entries.size());
  bool same = true;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    same = same && a.entries[i].message == b.entries[i].message &&
           a.entries[i].arrival_offset_ps == b.entries[i].arrival_offset_ps;
  }
  CHECK(same);
  m.seed = 2;
  const auto c = generate(m);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < a.entries.size(); ++i) differ += !(a.entries[i].message == c.entries[i].message);
  CHECK(differ > a.entries.size() / 2);
}

TEST_CASE("sequence ids are unique and arrivals ordered") {
  auto m = preset("memc_low");
  m.request_count = 4000;
  const auto t = generate(m);
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    CHECK(t.entries[i].message.seq_id == i + 1);  // 1-based
    if (i > 0) CHECK(t.entries[i].arrival_offset_ps >= t.entries[i - 1].arrival_offset_ps);
  }
}

TEST_CASE("fixed rate spaces arrivals by the period") {
  auto m = preset("memc_mid");
  m.request_count = 10;
  const auto t = generate(m);
  OfferedLoad load;
  load.mode = LoadMode::FixedRate;
  load.rate_rps = 1e6;
  const auto at = offered_load(t, load);
  REQUIRE(at.size() == 10);
  for (std::size_t i = 0; i < at.size(); ++i) CHECK(at[i].ps == i * 1'000'000);
  load.rate_rps = 3e6;  // 333333.33 ps, rounded up
  const auto at3 = offered_load(t, load);
  CHECK(at3[1].ps == 333'334);
  CHECK(at3[3].ps == 1'000'000);
}

TEST_CASE("closed loop releases only the window up front") {
  auto m = preset("memc_mid");
  m.request_count = 100;
  const auto t = generate(m);
  OfferedLoad load;
  load.concurrency = 8;
  const auto at = offered_load(t, load);
  CHECK(at.size() == 8);
  for (const auto& a : at) CHECK(a.ps == 0);
  load.concurrency = 500;
  CHECK(offered_load(t, load).size() == 100);
  load.concurrency = 0;
  CHECK_THROWS(offered_load(t, load));
}

TEST_CASE("keys and preload values") {
  CHECK(key_for_rank(255, 8) == "000000ff");
  CHECK(key_for_rank(1, 4) == "0001");
  const auto a = preload_value(1, "k", 64);
  CHECK(a.size() == 64);
  CHECK(a == preload_value(1, "k", 64));
  CHECK(a != preload_value(2, "k", 64));
  CHECK(a != preload_value(1, "j", 64));
}

TEST_CASE("splitmix reference outputs and bounded draws") {
  // Reference values of SplitMix64 seeded with 0.
  SplitMix64 g(0);
  CHECK(g.next() == 0xE220A8397B1DCDAFULL);
  CHECK(g.next() == 0x6E789E6AA1B965F4ULL);
  SplitMix64 r(9);
  for (int i = 0; i < 10000; ++i) CHECK(r.below(7) < 7);
  CHECK(SplitMix64::derive_seed(1, 0) != SplitMix64::derive_seed(1, 1));
}
