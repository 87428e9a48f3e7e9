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

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace arcsim::cores {

/// Work of one software stage: retired instructions and the core cycles
/// they take (instructions x CPI, rounded up).
struct StageWork {
  std::uint64_t instructions = 0;
  std::uint64_t cycles = 0;
};

struct CpuStageCost {
  double fixed_instr = 0;
  double instr_per_byte = 0;
  double instr_per_field = 0;
  double cpi = 1.0;

  StageWork eval(std::size_t bytes, std::size_t fields) const;
  void validate(std::string_view stage) const;
};

/// Software RPC stack costs of the baseline core. Defaults are the plain
/// cycle figures at CPI 1; the shipped calibration profile replaces them.
struct CpuRpcCostModel {
  CpuStageCost header_parse{120, 2, 0, 1.0};
  CpuStageCost dispatch{80, 0, 0, 1.0};
  CpuStageCost deserialize{0, 9, 0, 1.0};
  CpuStageCost header_create{120, 0, 0, 1.0};
  CpuStageCost serialize{0, 7, 0, 1.0};

  void validate() const;
};

/// Business logic of one method: compute instructions plus `meta_accesses`
/// extra metadata lines (hash chains, LRU links, stats) on top of the data
/// structure accesses the service itself performs.
struct MethodCost {
  double instructions = 0;
  double instr_per_byte = 0;
  double cpi = 1.0;
  std::uint32_t meta_accesses = 0;

  StageWork eval(std::size_t bytes) const;
};

struct LogicConfig {
  std::map<std::string, MethodCost, std::less<>> methods = {
      {"GET", {600, 0, 1.0, 2}},        {"SET", {900, 0, 1.0, 3}},
      {"StorePost", {4000, 0, 1.0, 0}}, {"ReadPost", {2500, 0, 1.0, 0}},
      {"ReadPosts", {6000, 0, 1.0, 0}}, {"ComposeUniqueId", {400, 0, 1.0, 0}},
  };

  const MethodCost& cost(std::string_view method) const;
  void validate() const;
};

/// Host-side integration costs shared by the NetCore, AppCore and the
/// baseline core.
struct HostConfig {
  std::uint32_t poll_ns = 50;
  std::uint32_t transmit_ns = 50;
  /// Core-side issue cost of one posted UC store.
  std::uint32_t uc_store_issue_ns = 10;
  /// Packets taken per NIC poll by the NetCore.
  std::uint32_t net_burst = 8;
  /// Instructions of packet I/O bookkeeping per packet (both modes).
  double io_instr_per_packet = 100;
  double io_cpi = 1.0;
  /// AppCore instructions per record handed over by a token.
  double app_record_instr = 60;
  double app_cpi = 1.0;
  std::uint32_t baseline_cores = 1;
  /// Back-off before a core retries a full output buffer.
  std::uint32_t space_retry_ns = 100;

  void validate() const;
};

inline std::uint64_t ceil_u64(double x) {
  return x <= 0 ? 0 : static_cast<std::uint64_t>(std::ceil(x - 1e-9));
}

}  // namespace arcsim::cores
