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

#include "arcsim/cores/simulation.hpp"
#include "arcsim/simkern/kernel.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace arcsim::metrics {

/// injected != completed + drops + errors, or work left at quiescence.
class ConservationViolation : public kern::SimulationError {
 public:
  using kern::SimulationError::SimulationError;
};

class MismatchedRuns : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Percentiles {
  bool empty = true;
  double p50_ns = 0;
  double p95_ns = 0;
  double p99_ns = 0;
};

/// Exact nearest-rank percentiles (rank ceil(q*n)) over picosecond samples.
Percentiles percentiles(std::vector<std::uint64_t> samples_ps);

struct ActorReport {
  std::string name;
  std::uint64_t header_parse = 0;
  std::uint64_t dispatch = 0;
  std::uint64_t deserialize = 0;
  std::uint64_t logic = 0;
  std::uint64_t header_create = 0;
  std::uint64_t serialize = 0;
  std::uint64_t io = 0;
  std::uint64_t busy_cycles = 0;
  std::uint64_t stall_cycles = 0;
  std::uint64_t instructions = 0;
  std::uint64_t codec_calls = 0;
  std::uint64_t codec_bytes = 0;

  std::uint64_t stage_sum() const {
    return header_parse + dispatch + deserialize + logic + header_create + serialize + io;
  }
  std::uint64_t active_cycles() const { return busy_cycles + stall_cycles; }
};

struct EngineReport {
  std::uint64_t header_parse = 0;
  std::uint64_t dispatch = 0;
  std::uint64_t deserialize = 0;
  std::uint64_t header_create = 0;
  std::uint64_t serialize = 0;
  std::uint64_t error_path = 0;
  std::uint64_t busy_cycles = 0;
  std::uint64_t rpcs = 0;
  std::uint64_t errors = 0;

  std::uint64_t stage_sum() const {
    return header_parse + dispatch + deserialize + header_create + serialize + error_path;
  }
};

struct StatsReport {
  std::string tool;
  std::string version;
  std::string fingerprint;
  std::string mode;
  std::string preset;
  std::string service;
  std::uint64_t seed = 0;
  std::string prng;

  std::uint64_t requests_injected = 0;
  std::uint64_t requests_completed = 0;
  std::uint64_t drops = 0;
  std::uint64_t errors = 0;
  std::uint64_t sim_time_ps = 0;
  double throughput_rps = 0;
  Percentiles latency;

  std::vector<ActorReport> actors;
  bool has_engines = false;
  EngineReport rx;
  EngineReport tx;
  std::uint64_t simultaneous_busy = 0;
  std::uint64_t overflow_events = 0;
  std::uint64_t rejected_commands = 0;
  std::uint64_t status_words = 0;
  std::uint64_t tokens = 0;
  std::uint64_t accel_page_faults = 0;
  bool fsm_legal = true;

  mem::MemoryStats memory;

  /// Fraction of the five stage cycles of both engines spent in dispatch
  /// plus deserialize (dispatch is counted as part of the receive stage).
  double deser_fraction() const;
  /// RxEngine share of the five stage cycles.
  double rx_share() const;
  /// The actor that runs business logic.
  const ActorReport& logic_actor() const;

  /// Flat `key=value` lines in a fixed order.
  std::string to_kv() const;
  static std::string csv_header();
  std::string csv_row() const;
};

/// Builds the report of a finished run and enforces its invariants.
StatsReport finalize(const cores::RunResult& run, const std::string& fingerprint);

struct ComparisonReport {
  std::string preset;
  std::uint64_t seed = 0;
  std::string baseline_fingerprint;
  std::string arcalis_fingerprint;
  double speedup = 1.0;
  double throughput_ratio = 1.0;
  /// Reductions on the business-logic core, in [0, 1].
  double instruction_reduction = 0;
  double cycle_reduction = 0;
  double codec_byte_reduction = 0;

  std::string to_kv() const;
  static std::string csv_header();
  std::string csv_row() const;
};

/// Throws MismatchedRuns unless both reports describe the same workload
/// (preset, service, seed, request count).
ComparisonReport compare(const StatsReport& baseline, const StatsReport& accelerated);

/// Fixed-precision decimal used by every serialized report.
std::string fmt(double v);

}  // namespace arcsim::metrics
