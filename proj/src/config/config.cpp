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
#include "arcsim/config/config.hpp"

#include "arcsim_embedded.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace arcsim::config {

namespace {

using workload::LoadMode;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key) + " (expected " +
                    std::string(want) + ")");
}

template <class T>
T parse_num(std::string_view key, std::string_view v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) bad_value(key, v, std::is_floating_point_v<T> ? "a number" : "an integer");
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v, "true or false");
}

std::string show(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}
std::string show(std::uint64_t v) { return std::to_string(v); }
std::string show(bool v) { return v ? "true" : "false"; }

std::string show_ops(const std::vector<workload::OpRatio>& ops) {
  std::string s;
  for (const auto& op : ops) {
    if (!s.empty()) s += ',';
    s += op.method + ':' + show(op.ratio);
  }
  return s;
}

std::vector<workload::OpRatio> parse_ops(std::string_view key, std::string_view v) {
  std::vector<workload::OpRatio> ops;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const auto comma = std::min(v.find(',', pos), v.size());
    const std::string item = trim(v.substr(pos, comma - pos));
    const auto colon = item.find(':');
    if (colon == std::string::npos || colon == 0) bad_value(key, v, "METHOD:ratio[,METHOD:ratio...]");
    ops.push_back({item.substr(0, colon), parse_num<double>(key, trim(item.substr(colon + 1)))});
    pos = comma + 1;
  }
  return ops;
}

struct Entry {
  std::string doc;
  std::function<void(RunConfig&, std::string_view, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

using Table = std::map<std::string, Entry, std::less<>>;

/// Binds a key to a field reached through `ref`.
template <class T, class Ref>
void bind_key(Table& t, std::string name, std::string doc, Ref ref) {
  Entry e;
  e.doc = std::move(doc);
  e.set = [ref](RunConfig& c, std::string_view k, std::string_view v) {
    T& field = ref(c);
    if constexpr (std::is_same_v<T, bool>) {
      field = parse_bool(k, v);
    } else if constexpr (std::is_floating_point_v<T>) {
      field = parse_num<double>(k, v);
    } else {
      const auto x = parse_num<std::uint64_t>(k, v);
      if (x > std::numeric_limits<T>::max()) bad_value(k, v, "a smaller integer");
      field = static_cast<T>(x);
    }
  };
  e.get = [ref](const RunConfig& c) {
    const T& field = ref(const_cast<RunConfig&>(c));
    if constexpr (std::is_same_v<T, bool>) {
      return show(field);
    } else if constexpr (std::is_floating_point_v<T>) {
      return show(static_cast<double>(field));
    } else {
      return show(static_cast<std::uint64_t>(field));
    }
  };
  t.emplace(std::move(name), std::move(e));
}

#define ARCSIM_FIELD(table, key, doc, expr)                                                        \
  bind_key<std::remove_reference_t<decltype(std::declval<RunConfig&>().expr)>>(table, key, doc,       \
                                                                             [](RunConfig& c) -> auto& { return c.expr; })

void stage_keys(Table& t, const std::string& stage, cores::CpuStageCost cores::CpuRpcCostModel::*m) {
  const std::string p = "cpu." + stage + ".";
  bind_key<double>(t, p + "fixed_instr", "software " + stage + ": fixed instructions",
               [m](RunConfig& c) -> double& { return (c.sim.cpu.*m).fixed_instr; });
  bind_key<double>(t, p + "instr_per_byte", "software " + stage + ": instructions per byte",
               [m](RunConfig& c) -> double& { return (c.sim.cpu.*m).instr_per_byte; });
  bind_key<double>(t, p + "instr_per_field", "software " + stage + ": instructions per field",
               [m](RunConfig& c) -> double& { return (c.sim.cpu.*m).instr_per_field; });
  bind_key<double>(t, p + "cpi", "software " + stage + ": cycles per instruction",
               [m](RunConfig& c) -> double& { return (c.sim.cpu.*m).cpi; });
}

void logic_keys(Table& t, const std::string& method) {
  const std::string p = "logic." + method + ".";
  auto cost = [method](RunConfig& c) -> cores::MethodCost& { return c.sim.logic.methods[method]; };
  bind_key<double>(t, p + "instructions", method + " logic: instructions",
               [cost](RunConfig& c) -> double& { return cost(c).instructions; });
  bind_key<double>(t, p + "instr_per_byte", method + " logic: instructions per data byte",
               [cost](RunConfig& c) -> double& { return cost(c).instr_per_byte; });
  bind_key<double>(t, p + "cpi", method + " logic: cycles per instruction",
               [cost](RunConfig& c) -> double& { return cost(c).cpi; });
  bind_key<std::uint32_t>(t, p + "meta_accesses", method + " logic: extra metadata line accesses",
                      [cost](RunConfig& c) -> std::uint32_t& { return cost(c).meta_accesses; });
}

Table make_table() {
  Table t;
  {
    Entry e;
    e.doc = "execution mode: baseline or arcalis";
    e.set = [](RunConfig& c, std::string_view k, std::string_view v) {
      const auto m = cores::parse_mode(v);
      if (!m) bad_value(k, v, "baseline or arcalis");
      c.sim.mode = *m;
    };
    e.get = [](const RunConfig& c) { return std::string(cores::to_string(c.sim.mode)); };
    t.emplace("mode", std::move(e));
  }
  {
    Entry e;
    e.doc = "workload preset (resets the workload.* keys) or 'custom'";
    e.set = [](RunConfig& c, std::string_view k, std::string_view v) {
      if (v == "custom") {
        c.preset = "custom";
        c.sim.mix.name = "custom";
        return;
      }
      if (!workload::is_preset(v)) bad_value(k, v, "a preset name or custom");
      const auto seed = c.sim.mix.seed;
      const auto n = c.sim.mix.request_count;
      c.preset = std::string(v);
      c.sim.mix = workload::preset(v);
      c.sim.mix.seed = seed;
      c.sim.mix.request_count = n;
    };
    e.get = [](const RunConfig& c) { return c.preset; };
    t.emplace("preset", std::move(e));
  }
  {
    Entry e;
    e.doc = "calibration profile: default, none, or a file path";
    e.set = [](RunConfig& c, std::string_view, std::string_view v) { c.calibration = std::string(v); };
    e.get = [](const RunConfig& c) { return c.calibration; };
    t.emplace("calibration", std::move(e));
  }
  {
    Entry e;
    e.doc = "stats report output path";
    e.set = [](RunConfig& c, std::string_view, std::string_view v) { c.output_report = std::string(v); };
    e.get = [](const RunConfig& c) { return c.output_report; };
    t.emplace("output.report", std::move(e));
  }
  {
    Entry e;
    e.doc = "event trace output path";
    e.set = [](RunConfig& c, std::string_view, std::string_view v) { c.output_trace = std::string(v); };
    e.get = [](const RunConfig& c) { return c.output_trace; };
    t.emplace("output.trace", std::move(e));
  }
  {
    Entry e;
    e.doc = "service: memcached, post_storage or unique_id";
    e.set = [](RunConfig& c, std::string_view k, std::string_view v) {
      if (v != "memcached" && v != "post_storage" && v != "unique_id") bad_value(k, v, "a built-in service");
      c.sim.mix.service = std::string(v);
    };
    e.get = [](const RunConfig& c) { return c.sim.mix.service; };
    t.emplace("workload.service", std::move(e));
  }
  {
    Entry e;
    e.doc = "operation mix, METHOD:ratio pairs separated by commas";
    e.set = [](RunConfig& c, std::string_view k, std::string_view v) { c.sim.mix.ops = parse_ops(k, v); };
    e.get = [](const RunConfig& c) { return show_ops(c.sim.mix.ops); };
    t.emplace("workload.ops", std::move(e));
  }
  {
    Entry e;
    e.doc = "offered load: closed_loop or fixed_rate";
    e.set = [](RunConfig& c, std::string_view k, std::string_view v) {
      if (v == "closed_loop") {
        c.sim.load.mode = LoadMode::ClosedLoop;
      } else if (v == "fixed_rate") {
        c.sim.load.mode = LoadMode::FixedRate;
      } else {
        bad_value(k, v, "closed_loop or fixed_rate");
      }
    };
    e.get = [](const RunConfig& c) {
      return std::string(c.sim.load.mode == LoadMode::ClosedLoop ? "closed_loop" : "fixed_rate");
    };
    t.emplace("load.mode", std::move(e));
  }

  ARCSIM_FIELD(t, "workload.key_size", "key bytes", sim.mix.key_size);
  ARCSIM_FIELD(t, "workload.value_size", "value bytes", sim.mix.value_size);
  ARCSIM_FIELD(t, "workload.keyspace_n", "distinct keys (Zipf N)", sim.mix.keyspace_n);
  ARCSIM_FIELD(t, "workload.zipf_s", "Zipf skew", sim.mix.zipf_s);
  ARCSIM_FIELD(t, "workload.requests", "requests in the trace", sim.mix.request_count);
  ARCSIM_FIELD(t, "workload.seed", "trace seed", sim.mix.seed);
  ARCSIM_FIELD(t, "workload.text_size", "post text bytes", sim.mix.text_size);
  ARCSIM_FIELD(t, "workload.posts_per_read", "post ids per ReadPosts", sim.mix.posts_per_read);
  ARCSIM_FIELD(t, "load.concurrency", "closed-loop requests outstanding", sim.load.concurrency);
  ARCSIM_FIELD(t, "load.rate_rps", "fixed-rate arrivals per second", sim.load.rate_rps);

  ARCSIM_FIELD(t, "latency.cpu_freq_hz", "CPU clock", sim.latency.cpu_freq_hz);
  ARCSIM_FIELD(t, "latency.accel_freq_hz", "accelerator clock", sim.latency.accel_freq_hz);
  ARCSIM_FIELD(t, "latency.l1_hit_cycles", "L1 hit (CPU cycles)", sim.latency.l1_hit_cycles);
  ARCSIM_FIELD(t, "latency.l2_hit_cycles", "L2 hit (CPU cycles)", sim.latency.l2_hit_cycles);
  ARCSIM_FIELD(t, "latency.llc_hit_cycles", "LLC hit (CPU cycles)", sim.latency.llc_hit_cycles);
  ARCSIM_FIELD(t, "latency.dram_ns", "DRAM access", sim.latency.dram_ns);
  ARCSIM_FIELD(t, "latency.accel_cache_hit_cycles", "accelerator cache hit (accel cycles)",
               sim.latency.accel_cache_hit_cycles);
  ARCSIM_FIELD(t, "latency.uc_interconnect_ns", "one-way UC command latency", sim.latency.uc_interconnect_ns);
  ARCSIM_FIELD(t, "latency.tlb_hit_cycles", "accelerator TLB hit (accel cycles)", sim.latency.tlb_hit_cycles);
  ARCSIM_FIELD(t, "latency.page_walk_ns", "accelerator page walk", sim.latency.page_walk_ns);
  ARCSIM_FIELD(t, "latency.dca_injection_ns", "NIC to LLC injection", sim.latency.dca_injection_ns);

  ARCSIM_FIELD(t, "memory.l1_bytes", "L1 size per core", sim.memory.l1_bytes);
  ARCSIM_FIELD(t, "memory.l1_assoc", "L1 ways", sim.memory.l1_assoc);
  ARCSIM_FIELD(t, "memory.l2_bytes", "L2 size per core", sim.memory.l2_bytes);
  ARCSIM_FIELD(t, "memory.l2_assoc", "L2 ways", sim.memory.l2_assoc);
  ARCSIM_FIELD(t, "memory.llc_bytes", "shared LLC size", sim.memory.llc_bytes);
  ARCSIM_FIELD(t, "memory.llc_assoc", "LLC ways", sim.memory.llc_assoc);
  ARCSIM_FIELD(t, "memory.accel_cache_bytes", "accelerator cache size", sim.memory.accel_cache_bytes);
  ARCSIM_FIELD(t, "memory.accel_cache_assoc", "accelerator cache ways", sim.memory.accel_cache_assoc);
  ARCSIM_FIELD(t, "memory.tlb_entries", "accelerator TLB entries", sim.memory.tlb_entries);
  ARCSIM_FIELD(t, "memory.buffer_bytes", "size of each shared buffer", sim.memory.buffer_bytes);
  ARCSIM_FIELD(t, "memory.buffer_slot_bytes", "shared buffer allocation unit", sim.memory.buffer_slot_bytes);
  ARCSIM_FIELD(t, "memory.buffer_page_bytes", "page size backing the shared buffers", sim.memory.buffer_page_bytes);
  ARCSIM_FIELD(t, "memory.premap_buffers", "map all shared buffers up front", sim.memory.premap_buffers);
  ARCSIM_FIELD(t, "memory.cpu_mlp", "CPU lines overlapped per access", sim.memory.cpu_mlp);
  ARCSIM_FIELD(t, "memory.accel_mlp", "accelerator lines overlapped per access", sim.memory.accel_mlp);
  ARCSIM_FIELD(t, "memory.os_page_fault_ns", "host page population cost", sim.memory.os_page_fault_ns);
  ARCSIM_FIELD(t, "memory.heap_resident", "application heap populated before the run", sim.memory.heap_resident);

  ARCSIM_FIELD(t, "accel.header_parse_fixed", "engine header parse (cycles)", sim.accel.cost.header_parse_fixed);
  ARCSIM_FIELD(t, "accel.header_parse_per_byte", "engine header parse per byte", sim.accel.cost.header_parse_per_byte);
  ARCSIM_FIELD(t, "accel.dispatch", "engine dispatch (cycles)", sim.accel.cost.dispatch);
  ARCSIM_FIELD(t, "accel.deser_fixed", "engine deserialize fixed (cycles)", sim.accel.cost.deser_fixed);
  ARCSIM_FIELD(t, "accel.deser_per_byte", "engine deserialize per body byte", sim.accel.cost.deser_per_byte);
  ARCSIM_FIELD(t, "accel.deser_per_field", "engine deserialize per field", sim.accel.cost.deser_per_field);
  ARCSIM_FIELD(t, "accel.header_create", "engine header create (cycles)", sim.accel.cost.header_create);
  ARCSIM_FIELD(t, "accel.ser_fixed", "engine serialize fixed (cycles)", sim.accel.cost.ser_fixed);
  ARCSIM_FIELD(t, "accel.ser_per_byte", "engine serialize per body byte", sim.accel.cost.ser_per_byte);
  ARCSIM_FIELD(t, "accel.ser_per_field", "engine serialize per field", sim.accel.cost.ser_per_field);
  ARCSIM_FIELD(t, "accel.store_issue_per_line", "engine cycles to issue one stored line",
               sim.accel.cost.store_issue_per_line);
  ARCSIM_FIELD(t, "accel.cleanup", "engine DONE bookkeeping (cycles)", sim.accel.cost.cleanup);
  ARCSIM_FIELD(t, "accel.pending_depth", "descriptor queue depth per engine", sim.accel.pending_depth);
  ARCSIM_FIELD(t, "accel.app_batch_max", "entries per AppCore token", sim.accel.app_batch_max);
  ARCSIM_FIELD(t, "accel.net_batch_max", "entries per NetCore token", sim.accel.net_batch_max);
  ARCSIM_FIELD(t, "accel.watch_base", "watch range base address", sim.accel.watch.base);
  ARCSIM_FIELD(t, "accel.watch_length", "watch range length", sim.accel.watch.length);

  ARCSIM_FIELD(t, "host.poll_ns", "NIC poll cost per packet", sim.host.poll_ns);
  ARCSIM_FIELD(t, "host.transmit_ns", "NIC transmit cost per packet", sim.host.transmit_ns);
  ARCSIM_FIELD(t, "host.uc_store_issue_ns", "core cost of issuing a posted UC store", sim.host.uc_store_issue_ns);
  ARCSIM_FIELD(t, "host.net_burst", "packets per NetCore poll", sim.host.net_burst);
  ARCSIM_FIELD(t, "host.io_instr_per_packet", "packet I/O instructions per packet", sim.host.io_instr_per_packet);
  ARCSIM_FIELD(t, "host.io_cpi", "packet I/O CPI", sim.host.io_cpi);
  ARCSIM_FIELD(t, "host.app_record_instr", "AppCore instructions per record", sim.host.app_record_instr);
  ARCSIM_FIELD(t, "host.app_cpi", "AppCore record handling CPI", sim.host.app_cpi);
  ARCSIM_FIELD(t, "host.baseline_cores", "cores in baseline mode", sim.host.baseline_cores);
  ARCSIM_FIELD(t, "host.space_retry_ns", "back-off on a full output buffer", sim.host.space_retry_ns);

  stage_keys(t, "header_parse", &cores::CpuRpcCostModel::header_parse);
  stage_keys(t, "dispatch", &cores::CpuRpcCostModel::dispatch);
  stage_keys(t, "deserialize", &cores::CpuRpcCostModel::deserialize);
  stage_keys(t, "header_create", &cores::CpuRpcCostModel::header_create);
  stage_keys(t, "serialize", &cores::CpuRpcCostModel::serialize);
  for (const char* m : {"GET", "SET", "StorePost", "ReadPost", "ReadPosts", "ComposeUniqueId"}) logic_keys(t, m);
  return t;
}

#undef ARCSIM_FIELD

const Table& table() {
  static const Table t = make_table();
  return t;
}

bool is_meta(std::string_view key) {
  return key == "calibration" || key == "output.report" || key == "output.trace";
}

}  // namespace

const std::vector<KeyInfo>& keys() {
  static const std::vector<KeyInfo> out = [] {
    std::vector<KeyInfo> v;
    for (const auto& [name, e] : table()) v.push_back({name, e.doc});
    return v;
  }();
  return out;
}

bool has_key(std::string_view key) { return table().find(key) != table().end(); }

void set(RunConfig& cfg, std::string_view key, std::string_view value) {
  const auto it = table().find(key);
  if (it == table().end()) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  it->second.set(cfg, key, trim(value));
}

std::string get(const RunConfig& cfg, std::string_view key) {
  const auto it = table().find(key);
  if (it == table().end()) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  return it->second.get(cfg);
}

std::vector<Assignment> parse_assignments(std::string_view text, std::string_view origin) {
  std::vector<Assignment> out;
  std::size_t lineno = 0, pos = 0;
  while (pos < text.size()) {
    const auto nl = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string l = trim(line);
    if (l.empty()) continue;
    const auto eq = l.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(l).substr(0, eq));
    std::string value = trim(std::string_view(l).substr(eq + 1));
    if (key.empty()) throw ConfigError(std::string(origin) + ":" + std::to_string(lineno) + ": empty key");
    if (!has_key(key)) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::vector<Assignment> load_assignments(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_assignments(ss.str(), path);
}

std::string_view default_calibration() { return embedded::kDefaultCalibration; }

RunConfig build(const std::vector<Assignment>& assignments) {
  RunConfig cfg;
  std::string preset = cfg.preset;
  for (const auto& [k, v] : assignments) {
    if (k == "calibration") cfg.calibration = v;
    if (k == "preset") preset = v;
  }
  std::vector<Assignment> profile;
  if (cfg.calibration == "default") {
    profile = parse_assignments(default_calibration(), "calibration:default");
  } else if (cfg.calibration != "none") {
    profile = load_assignments(cfg.calibration);
  }
  for (const auto& [k, v] : profile) {
    if (k == "preset" || k == "mode" || is_meta(k) || k.rfind("workload.", 0) == 0) {
      throw ConfigError("calibration profile may not set '" + k + "'");
    }
    set(cfg, k, v);
  }
  set(cfg, "preset", preset);
  for (const auto& [k, v] : assignments) {
    if (k == "calibration" || k == "preset") continue;
    set(cfg, k, v);
  }
  return cfg;
}

std::string canonical(const RunConfig& cfg) {
  std::string out;
  for (const auto& [name, e] : table()) {
    if (is_meta(name)) continue;
    out += name;
    out += '=';
    out += e.get(cfg);
    out += '\n';
  }
  return out;
}

std::string fingerprint(const RunConfig& cfg) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : canonical(cfg)) h = (h ^ static_cast<std::uint8_t>(c)) * 0x100000001B3ULL;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace arcsim::config
