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

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace arcsim::config {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A run as the user describes it. `sim` holds every model parameter; the
/// other fields say where it came from and where results go.
struct RunConfig {
  cores::SimConfig sim;
  std::string preset = "memc_mid";
  /// "default" (the shipped profile), "none" (model defaults) or a path.
  std::string calibration = "default";
  std::string output_report;
  std::string output_trace;
};

struct KeyInfo {
  std::string name;
  std::string doc;
};

/// Every settable key, in canonical (sorted) order.
const std::vector<KeyInfo>& keys();
bool has_key(std::string_view key);

/// Throws ConfigError on an unknown key or a malformed value.
void set(RunConfig& cfg, std::string_view key, std::string_view value);
std::string get(const RunConfig& cfg, std::string_view key);

using Assignment = std::pair<std::string, std::string>;

/// Parses `key = value` lines; `#` starts a comment, blank lines are
/// skipped. Throws ConfigError with the line number on syntax errors.
std::vector<Assignment> parse_assignments(std::string_view text, std::string_view origin = "<config>");
std::vector<Assignment> load_assignments(const std::string& path);

/// Builds a config from layered assignments. `calibration` and `preset`
/// are applied first (last occurrence wins), then the profile, then the
/// preset's workload, then every other assignment in order.
RunConfig build(const std::vector<Assignment>& assignments);

/// Text of the shipped default calibration profile.
std::string_view default_calibration();

/// Canonical `key=value` serialization of all model keys (sorted; output
/// paths and the calibration source are left out since their effect is
/// already in the values).
std::string canonical(const RunConfig& cfg);
/// FNV-1a 64 of canonical(), as 16 hex digits.
std::string fingerprint(const RunConfig& cfg);

}  // namespace arcsim::config
