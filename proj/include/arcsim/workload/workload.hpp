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
#include "arcsim/wirecodec/codec.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace arcsim::workload {

class InvalidMix : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct OpRatio {
  std::string method;
  double ratio = 0;
};

struct WorkloadMix {
  std::string name = "custom";
  std::string service = "memcached";
  std::vector<OpRatio> ops;
  std::size_t key_size = 16;
  std::size_t value_size = 64;
  std::uint64_t keyspace_n = 100'000;
  double zipf_s = 0.99;
  std::uint64_t request_count = 100'000;
  std::uint64_t seed = 1;
  /// PostStorage shapes.
  std::size_t text_size = 256;
  std::size_t posts_per_read = 10;

  /// Throws InvalidMix.
  void validate() const;
  double ratio_of(std::string_view method) const;
};

std::vector<std::string> preset_names();
bool is_preset(std::string_view name);
/// Throws InvalidMix for unknown names.
WorkloadMix preset(std::string_view name);

struct TraceEntry {
  std::uint64_t arrival_offset_ps = 0;
  wire::RpcMessage message;
};

struct RequestTrace {
  std::string service;
  std::vector<TraceEntry> entries;
};

/// Draws ranks 1..n with P(k) proportional to k^-s by inverting the CDF.
class ZipfSampler {
 public:
  ZipfSampler(std::uint64_t n, double s);
  std::uint64_t sample(double u) const;
  double probability(std::uint64_t rank) const;
  std::uint64_t n() const { return static_cast<std::uint64_t>(cdf_.size()); }

 private:
  std::vector<double> cdf_;
};

/// Zero-padded lowercase hex of `rank`, `width` characters wide.
std::string key_for_rank(std::uint64_t rank, std::size_t width);

/// Deterministic contents for an item that was never written by the trace
/// (the store is modeled as preloaded with every key).
std::string preload_value(std::uint64_t seed, std::string_view key, std::size_t size);

RequestTrace generate(const WorkloadMix& mix);

enum class LoadMode : std::uint8_t { ClosedLoop, FixedRate };

struct OfferedLoad {
  LoadMode mode = LoadMode::ClosedLoop;
  /// Requests outstanding at once in closed-loop mode.
  std::uint32_t concurrency = 32;
  double rate_rps = 1e6;

  void validate() const;
};

/// Fixed-rate arrival times (i / rate, rounded up to the picosecond). In
/// closed-loop mode only the first `concurrency` requests have a fixed
/// arrival (time 0); each later one is issued when a response leaves.
std::vector<kern::SimTime> offered_load(const RequestTrace& trace, const OfferedLoad& load);

}  // namespace arcsim::workload
