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
#include "arcsim/cores/cost_models.hpp"

#include <stdexcept>
#include <string>

namespace arcsim::cores {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

StageWork CpuStageCost::eval(std::size_t bytes, std::size_t fields) const {
  const double instr = fixed_instr + instr_per_byte * static_cast<double>(bytes) +
                       instr_per_field * static_cast<double>(fields);
  return StageWork{ceil_u64(instr), ceil_u64(instr * cpi)};
}

void CpuStageCost::validate(std::string_view stage) const {
  const std::string s(stage);
  require(fixed_instr >= 0 && instr_per_byte >= 0 && instr_per_field >= 0, "cpu." + s + ": costs must be >= 0");
  require(cpi > 0, "cpu." + s + ".cpi must be > 0");
}

void CpuRpcCostModel::validate() const {
  header_parse.validate("header_parse");
  dispatch.validate("dispatch");
  deserialize.validate("deserialize");
  header_create.validate("header_create");
  serialize.validate("serialize");
}

StageWork MethodCost::eval(std::size_t bytes) const {
  const double instr = instructions + instr_per_byte * static_cast<double>(bytes);
  return StageWork{ceil_u64(instr), ceil_u64(instr * cpi)};
}

const MethodCost& LogicConfig::cost(std::string_view method) const {
  const auto it = methods.find(method);
  if (it == methods.end()) throw std::invalid_argument("logic: no cost model for method " + std::string(method));
  return it->second;
}

void LogicConfig::validate() const {
  for (const auto& [name, c] : methods) {
    require(c.instructions >= 0 && c.instr_per_byte >= 0, "logic." + name + ": costs must be >= 0");
    require(c.cpi > 0, "logic." + name + ".cpi must be > 0");
  }
}

void HostConfig::validate() const {
  require(net_burst >= 1, "host.net_burst must be >= 1");
  require(baseline_cores >= 1 && baseline_cores <= 16, "host.baseline_cores must be in [1, 16]");
  require(io_instr_per_packet >= 0 && app_record_instr >= 0, "host instruction counts must be >= 0");
  require(io_cpi > 0 && app_cpi > 0, "host CPI values must be > 0");
  require(space_retry_ns >= 1, "host.space_retry_ns must be >= 1");
}

}  // namespace arcsim::cores
