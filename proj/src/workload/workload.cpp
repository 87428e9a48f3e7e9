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

#include "arcsim/workload/workload.hpp"

#include "arcsim/workload/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace arcsim::workload {

namespace {

struct PresetRow {
  const char* name;
  const char* service;
  std::vector<OpRatio> ops;
  std::size_t key_size;
  std::size_t value_size;
};

const std::vector<PresetRow>& preset_table() {
  static const std::vector<PresetRow> rows = {
      {"memc_low", "memcached", {{"SET", 0.2}, {"GET", 0.8}}, 16, 64},
      {"memc_mid", "memcached", {{"SET", 0.5}, {"GET", 0.5}}, 16, 64},
      {"memc_high", "memcached", {{"SET", 0.8}, {"GET", 0.2}}, 16, 64},
      {"memc_tiny", "memcached", {{"SET", 0.5}, {"GET", 0.5}}, 8, 8},
      {"memc_small", "memcached", {{"SET", 0.5}, {"GET", 0.5}}, 16, 32},
      {"post_low", "post_storage", {{"StorePost", 0.1}, {"ReadPost", 0.5}, {"ReadPosts", 0.4}}, 0, 0},
      {"post_mid",
       "post_storage",
       {{"StorePost", 1.0 / 3}, {"ReadPost", 1.0 / 3}, {"ReadPosts", 1.0 / 3}},
       0,
       0},
      {"post_high", "post_storage", {{"StorePost", 0.9}, {"ReadPost", 0.05}, {"ReadPosts", 0.05}}, 0, 0},
      {"unique_id", "unique_id", {{"ComposeUniqueId", 1.0}}, 0, 0},
  };
  return rows;
}

std::size_t hex_digits(std::uint64_t v) {
  std::size_t n = 1;
  while (v >>= 4) ++n;
  return n;
}

wire::Field string_field(std::uint16_t id, wire::WireType t, std::string v) {
  return wire::Field{id, t, std::move(v)};
}

wire::Field i64_field(std::uint16_t id, std::int64_t v) { return wire::Field{id, wire::WireType::I64, v}; }

std::string random_bytes(SplitMix64& rng, std::size_t n) {
  std::string s(n, '\0');
  std::size_t i = 0;
  while (i < n) {
    std::uint64_t w = rng.next();
    for (int b = 0; b < 8 && i < n; ++b, w >>= 8) s[i++] = static_cast<char>(w & 0xFF);
  }
  return s;
}

std::string random_text(SplitMix64& rng, std::size_t n) {
  static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz ";
  std::string s(n, ' ');
  for (auto& c : s) c = kAlphabet[rng.below(sizeof(kAlphabet) - 1)];
  return s;
}

}  // namespace

void WorkloadMix::validate() const {
  const auto& schema = wire::builtin_schema(service);  // throws for unknown services
  if (ops.empty()) throw InvalidMix("mix '" + name + "' has no operations");
  double sum = 0;
  for (const auto& op : ops) {
    if (op.ratio < 0) throw InvalidMix("mix '" + name + "': negative ratio for " + op.method);
    if (schema.find_method(op.method) == nullptr) {
      throw InvalidMix("mix '" + name + "': " + op.method + " is not a " + service + " method");
    }
    sum += op.ratio;
  }
  if (std::fabs(sum - 1.0) > 1e-9) throw InvalidMix("mix '" + name + "': ratios sum to " + std::to_string(sum));
  if (request_count == 0) throw InvalidMix("mix '" + name + "': request_count must be > 0");
  if (keyspace_n == 0) throw InvalidMix("mix '" + name + "': keyspace_n must be > 0");
  if (!(zipf_s >= 0)) throw InvalidMix("mix '" + name + "': zipf_s must be >= 0");
  if (service == "memcached" && key_size < hex_digits(keyspace_n)) {
    throw InvalidMix("mix '" + name + "': key_size too small for the keyspace");
  }
  if (service == "post_storage" && posts_per_read == 0) throw InvalidMix("posts_per_read must be > 0");
}

double WorkloadMix::ratio_of(std::string_view method) const {
  for (const auto& op : ops) {
    if (op.method == method) return op.ratio;
  }
  return 0;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& r : preset_table()) out.emplace_back(r.name);
  return out;
}

bool is_preset(std::string_view name) {
  for (const auto& r : preset_table()) {
    if (name == r.name) return true;
  }
  return false;
}

WorkloadMix preset(std::string_view name) {
  for (const auto& r : preset_table()) {
    if (name != r.name) continue;
    WorkloadMix m;
    m.name = r.name;
    m.service = r.service;
    m.ops = r.ops;
    if (m.service == "memcached") {
      m.key_size = r.key_size;
      m.value_size = r.value_size;
    }
    return m;
  }
  throw InvalidMix("unknown workload preset '" + std::string(name) + "'");
}

ZipfSampler::ZipfSampler(std::uint64_t n, double s) {
  if (n == 0) throw InvalidMix("zipf keyspace must be > 0");
  cdf_.resize(n);
  double acc = 0;
  for (std::uint64_t k = 1; k <= n; ++k) {
    acc += std::pow(static_cast<double>(k), -s);
    cdf_[k - 1] = acc;
  }
  for (auto& c : cdf_) c /= acc;
  cdf_.back() = 1.0;
}

std::uint64_t ZipfSampler::sample(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), cdf_.size() - 1)) + 1;
}

double ZipfSampler::probability(std::uint64_t rank) const {
  if (rank == 0 || rank > cdf_.size()) return 0;
  return rank == 1 ? cdf_[0] : cdf_[rank - 1] - cdf_[rank - 2];
}

std::string key_for_rank(std::uint64_t rank, std::size_t width) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s(width, '0');
  for (std::size_t i = width; i-- > 0 && rank != 0; rank >>= 4) s[i] = kHex[rank & 0xF];
  return s;
}

std::string preload_value(std::uint64_t seed, std::string_view key, std::size_t size) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : key) h = (h ^ static_cast<std::uint8_t>(c)) * 0x100000001B3ULL;
  SplitMix64 rng(SplitMix64::derive_seed(seed, 0x7072656C6F6164ULL) ^ h);
  return random_bytes(rng, size);
}

RequestTrace generate(const WorkloadMix& mix) {
  mix.validate();
  const auto& schema = wire::builtin_schema(mix.service);
  const SplitMix64 root(mix.seed);
  SplitMix64 op_rng = root.split(0);
  SplitMix64 key_rng = root.split(1);
  SplitMix64 data_rng = root.split(2);
  const ZipfSampler zipf(mix.keyspace_n, mix.zipf_s);

  std::vector<double> cumulative;
  double acc = 0;
  for (const auto& op : mix.ops) cumulative.push_back(acc += op.ratio);

  RequestTrace trace;
  trace.service = mix.service;
  trace.entries.reserve(mix.request_count);
  for (std::uint64_t i = 0; i < mix.request_count; ++i) {
    const double u = op_rng.uniform() * acc;
    std::size_t pick = 0;
    while (pick + 1 < cumulative.size() && u >= cumulative[pick]) ++pick;
    const auto* method = schema.find_method(mix.ops[pick].method);

    wire::RpcMessage m;
    m.seq_id = static_cast<std::uint32_t>(i + 1);
    m.method_id = method->id;
    m.direction = wire::Direction::Request;
    const std::string& name = method->name;
    if (name == "SET" || name == "GET") {
      m.fields.push_back(string_field(1, wire::WireType::String,
                                      key_for_rank(zipf.sample(key_rng.uniform()), mix.key_size)));
      if (name == "SET") m.fields.push_back(string_field(2, wire::WireType::Bytes, random_bytes(data_rng, mix.value_size)));
    } else if (name == "StorePost") {
      m.fields.push_back(i64_field(1, static_cast<std::int64_t>(i + 1)));
      m.fields.push_back(i64_field(2, static_cast<std::int64_t>(zipf.sample(key_rng.uniform()))));
      m.fields.push_back(i64_field(3, static_cast<std::int64_t>(data_rng.below(10'000) + 1)));
      m.fields.push_back(string_field(4, wire::WireType::String, random_text(data_rng, mix.text_size)));
    } else if (name == "ReadPost") {
      m.fields.push_back(i64_field(1, static_cast<std::int64_t>(i + 1)));
      m.fields.push_back(i64_field(2, static_cast<std::int64_t>(zipf.sample(key_rng.uniform()))));
    } else if (name == "ReadPosts") {
      m.fields.push_back(i64_field(1, static_cast<std::int64_t>(i + 1)));
      wire::ListValue ids;
      ids.elem_type = wire::WireType::I64;
      for (std::size_t k = 0; k < mix.posts_per_read; ++k) {
        ids.items.emplace_back(static_cast<std::int64_t>(zipf.sample(key_rng.uniform())));
      }
      m.fields.push_back(wire::Field{2, wire::WireType::List, std::move(ids)});
    }
    trace.entries.push_back(TraceEntry{0, std::move(m)});
  }
  return trace;
}

void OfferedLoad::validate() const {
  if (mode == LoadMode::ClosedLoop && concurrency == 0) throw InvalidMix("closed-loop concurrency must be >= 1");
  if (mode == LoadMode::FixedRate && !(rate_rps > 0)) throw InvalidMix("fixed rate must be > 0");
}

std::vector<kern::SimTime> offered_load(const RequestTrace& trace, const OfferedLoad& load) {
  load.validate();
  std::vector<kern::SimTime> out;
  if (load.mode == LoadMode::ClosedLoop) {
    out.assign(std::min<std::size_t>(load.concurrency, trace.entries.size()), kern::SimTime{});
    return out;
  }
  out.reserve(trace.entries.size());
  const long double period_ps = static_cast<long double>(kern::kPicosPerSecond) / load.rate_rps;
  for (std::size_t i = 0; i < trace.entries.size(); ++i) {
    const long double t = period_ps * static_cast<long double>(i);
    out.emplace_back(static_cast<std::uint64_t>(std::ceil(t - 1e-6L)));
  }
  return out;
}

}  // namespace arcsim::workload
