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

#include "arcsim/config/config.hpp"
#include "arcsim/metrics/report.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace arcsim::sweeps {

class SweepError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One configuration key varied over a list of values, crossed with a set
/// of presets and repetitions.
struct SweepSpec {
  std::string name;
  std::string axis;
  std::vector<std::string> values;
  std::vector<std::string> presets;
  std::uint64_t repetitions = 1;
  /// Applied to every point, before the axis value and the seed.
  std::vector<config::Assignment> base;

  /// Throws SweepError.
  void validate() const;
};

/// Spec files use the config syntax. `sweep.*` keys describe the grid,
/// every other line is a base assignment. Throws SweepError.
SweepSpec parse_spec(std::string_view text, std::string_view origin = "<sweep>");
SweepSpec load_spec(const std::string& path);

/// Presets whose service is one of `services`, in preset order.
std::vector<std::string> presets_of(const std::vector<std::string>& services);

/// Seed of repetition `rep`: the base seed for rep 0, otherwise
/// SplitMix64::derive_seed(base, rep).
std::uint64_t repetition_seed(std::uint64_t base_seed, std::uint64_t rep);

struct SweepRow {
  std::string axis_value;
  std::string preset;
  std::uint64_t rep = 0;
  std::uint64_t seed = 0;
  std::string fingerprint;
  std::optional<metrics::StatsReport> report;
  std::string error;  // set when report is empty

  // Aggregates over the repetitions of (axis_value, preset).
  std::optional<double> mean_sim_time_ps;
  std::optional<double> mean_throughput_rps;
  // Relative to the first axis value of the same preset.
  std::optional<double> rel_exec_time;
  std::optional<double> rel_throughput;
};

/// Assignments that reproduce a single point on its own.
std::vector<config::Assignment> point_assignments(const SweepSpec& spec, const std::string& value,
                                                  const std::string& preset, std::uint64_t rep);

/// One row per (axis value, preset, repetition), in that nesting order.
/// Failing points become error rows. `jobs` > 1 runs points on threads,
/// one simulation instance per point.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned jobs = 1);

inline constexpr int kCsvFormat = 1;
std::string csv_header();
std::string csv(const SweepSpec& spec, const std::vector<SweepRow>& rows);

/// Throughput cells of a named comparison profile ("dagger_table").
struct ProfileCell {
  std::string preset;
  double set_ratio = 0;
  double target_mrps = 0;
  std::string fingerprint;
  std::optional<double> mrps;
  std::string error;
};

std::vector<std::string> profile_names();
/// Throws SweepError for an unknown name; run failures become error cells.
std::vector<ProfileCell> run_comparison_profile(std::string_view name,
                                                const std::vector<config::Assignment>& base = {});
std::string profile_csv(const std::vector<ProfileCell>& cells);

}  // namespace arcsim::sweeps
