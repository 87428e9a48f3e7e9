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

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int rc = -1;
  std::string out;
};

// Runs the CLI with stderr discarded.
Result cli(const std::string& args) {
  const std::string cmd = std::string(ARCSIM_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string kv(const std::string& text, const std::string& key) {
  const auto at = text.find("\n" + key + "=");
  if (at == std::string::npos) return {};
  const auto b = at + key.size() + 2;
  return text.substr(b, text.find('\n', b) - b);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("arcsim_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

}  // namespace

TEST_CASE("run writes identical reports for identical invocations") {
  TempDir d;
  const std::string args = "run --preset memc_low --mode arcalis --requests 20000 --seed 7 --output ";
  REQUIRE(cli(args + d / "a.txt").rc == 0);
  REQUIRE(cli(args + d / "b.txt").rc == 0);
  const auto a = slurp(d / "a.txt");
  CHECK(a == slurp(d / "b.txt"));
  CHECK(a.rfind("tool=arcsim\nversion=", 0) == 0);
  CHECK(kv(a, "preset") == "memc_low");
  CHECK(kv(a, "seed") == "7");
  CHECK(kv(a, "requests_completed") == "20000");
  CHECK(kv(a, "fingerprint").size() == 16);
}

TEST_CASE("usage and configuration errors exit with 1") {
  CHECK(cli("run --preset nonsense").rc == 1);
  CHECK(cli("run --latency.dram_ns abc").rc == 1);
  CHECK(cli("run --no-such-key 1").rc == 1);
  CHECK(cli("run --config /nonexistent.cfg").rc == 1);
  CHECK(cli("").rc == 1);
  CHECK(cli("schema gopher").rc == 1);
  CHECK(cli("sweep").rc == 1);
  CHECK(cli("run --workload.ops SET:0.4,GET:0.4").rc == 1);
  CHECK(cli("--help").rc == 0);
  CHECK(cli("--version").out.find("arcsim") != std::string::npos);
}

TEST_CASE("config files and flags layer in command line order") {
  TempDir d;
  std::ofstream(d / "c.cfg") << "# slower memory\nlatency.dram_ns = 100\n";
  const auto fp = [&](const std::string& a) { return kv(cli("run --requests 300 " + a).out, "fingerprint"); };
  const auto f80 = fp("--latency.dram_ns 80");
  const auto f100 = fp("--latency.dram_ns 100");
  CHECK(f80 != f100);
  CHECK(fp("--config " + d / "c.cfg") == f100);
  CHECK(fp("--config " + d / "c.cfg" + " --latency.dram_ns 80") == f80);
  CHECK(fp("--latency.dram_ns 80 --config " + d / "c.cfg") == f100);
  std::ofstream(d / "bad.cfg") << "latency.dram_ns 100\n";
  CHECK(cli("run --config " + d / "bad.cfg").rc == 1);
}

TEST_CASE("trace files carry provenance and are deterministic") {
  TempDir d;
  REQUIRE(cli("run --requests 40 --output " + d / "r.txt" + " --trace " + d / "t1.txt").rc == 0);
  REQUIRE(cli("trace --requests 40 -o " + d / "t2.txt").rc == 0);
  const auto t1 = slurp(d / "t1.txt");
  CHECK(t1 == slurp(d / "t2.txt"));
  CHECK(t1.rfind("# tool=arcsim version=", 0) == 0);
  CHECK(t1.find("fingerprint=" + kv(slurp(d / "r.txt"), "fingerprint")) != std::string::npos);
  CHECK(t1.find("\ntime_ps,actor,event\n") != std::string::npos);
}

TEST_CASE("schema prints every service") {
  const auto r = cli("schema");
  CHECK(r.rc == 0);
  for (const char* s : {"service memcached", "service post_storage", "service unique_id"}) {
    CHECK(r.out.find(s) != std::string::npos);
  }
  CHECK(cli("schema memcached").out.find("method") != std::string::npos);
}

TEST_CASE("compare emits the seven row table and chart data") {
  TempDir d;
  const auto r = cli("compare --requests 3000 --out-dir " + d.path.string());
  REQUIRE(r.rc == 0);
  const auto table = slurp(d / "comparison.csv");
  CHECK(std::count(table.begin(), table.end(), '\n') == 8);
  for (const char* p : {"memc_low", "memc_mid", "memc_high", "post_low", "post_mid", "post_high", "unique_id"}) {
    CHECK(table.find(std::string("arcsim,") + ARCSIM_VERSION + "," + p + ",") != std::string::npos);
    const auto chart = slurp(d / (std::string(p) + ".csv"));
    CHECK(chart.find("\narcsim," ARCSIM_VERSION ",") != std::string::npos);
    CHECK(std::count(chart.begin(), chart.end(), '\n') == 3);
  }
}

TEST_CASE("zeroed RPC costs leave almost no speedup") {
  TempDir d;
  const auto r = cli("compare --presets memc_mid --requests 5000 --calibration " ARCSIM_SOURCE_DIR
                     "/calibration/null.calib --out-dir " + d.path.string());
  REQUIRE(r.rc == 0);
  const auto table = slurp(d / "comparison.csv");
  const auto row = table.substr(table.find("\n") + 1);
  // speedup is the 7th column
  std::stringstream ss(row);
  std::string c;
  for (int i = 0; i < 7; ++i) std::getline(ss, c, ',');
  const double speedup = std::stod(c);
  CHECK(speedup > 0.9);
  CHECK(speedup < 1.1);
}

TEST_CASE("sweep: shipped spec, empty spec, rerun") {
  TempDir d;
  const std::string spec = ARCSIM_SOURCE_DIR "/sweeps/interconnect.sweep";
  REQUIRE(cli("sweep " + spec + " --requests 800 -o " + d / "a.csv").rc == 0);
  REQUIRE(cli("sweep " + spec + " --requests 800 --jobs 2 -o " + d / "b.csv").rc == 0);
  const auto a = slurp(d / "a.csv");
  CHECK(a == slurp(d / "b.csv"));
  CHECK(std::count(a.begin(), a.end(), '\n') == 1 + 4 * 9);
  for (const char* v : {",5,", ",100,", ",400,", ",700,"}) CHECK(a.find(v) != std::string::npos);
  CHECK(a.substr(a.find('\n')).find(",error,") == std::string::npos);

  std::ofstream(d / "empty.sweep") << "# nothing\n";
  CHECK(cli("sweep " + d / "empty.sweep").rc == 1);

  const auto p = cli("sweep --profile dagger_table --requests 1000");
  CHECK(p.rc == 0);
  CHECK(std::count(p.out.begin(), p.out.end(), '\n') == 5);
  CHECK(cli("sweep --profile nope").rc == 1);
}
