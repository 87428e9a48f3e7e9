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

#include "arcsim/accel/accelerator.hpp"
#include "arcsim/cores/actors.hpp"
#include "arcsim/cores/cost_models.hpp"
#include "arcsim/memmodel/memory_system.hpp"
#include "arcsim/workload/workload.hpp"

#include <optional>
#include <string>
#include <vector>

namespace arcsim::cores {

enum class Mode : std::uint8_t { Baseline, Arcalis };
std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view s);

/// Everything one simulation instance needs. Plain values only, so a
/// config can be copied per sweep point.
struct SimConfig {
  Mode mode = Mode::Arcalis;
  mem::LatencyConfig latency;
  mem::MemoryConfig memory;
  accel::AccelConfig accel;
  HostConfig host;
  CpuRpcCostModel cpu;
  LogicConfig logic;
  workload::WorkloadMix mix = workload::preset("memc_mid");
  workload::OfferedLoad load;
  bool trace_events = false;
  bool capture_responses = false;

  /// Throws std::invalid_argument (or workload::InvalidMix).
  void validate() const;
};

/// Raw outcome of one run, before aggregation into a report.
struct RunResult {
  Mode mode = Mode::Arcalis;
  std::string service;
  std::string preset;
  std::uint64_t seed = 0;
  std::uint64_t requests = 0;

  NicStats nic;
  /// Time of the last response leaving the NIC.
  kern::SimTime sim_time;
  /// Time of the last processed event.
  kern::SimTime end_time;
  bool quiescent = false;
  std::uint64_t events = 0;
  std::vector<std::uint64_t> latencies_ps;

  std::vector<CoreStats> cores;
  std::optional<accel::AccelStats> accel;
  accel::TransitionLog transitions;
  std::size_t accel_in_flight = 0;
  /// Bytes still allocated in the four shared buffers at the end.
  std::size_t buffer_residue = 0;
  mem::MemoryStats memory;
  std::uint64_t cpu_freq_hz = 0;
  std::uint64_t accel_freq_hz = 0;

  std::vector<std::pair<std::uint32_t, wire::Frame>> responses;
  std::string trace;

  /// The core that runs business logic: the AppCore or the first baseline
  /// core.
  const CoreStats& logic_core() const;
};

RunResult simulate(const SimConfig& cfg);
/// Runs a prepared trace (the mix still supplies service parameters).
RunResult simulate(const SimConfig& cfg, const workload::RequestTrace& trace);

}  // namespace arcsim::cores
