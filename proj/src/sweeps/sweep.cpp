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
#include "arcsim/sweeps/sweep.hpp"

#include "arcsim/workload/rng.hpp"
#include "arcsim/workload/workload.hpp"
#include "arcsim_version.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace arcsim::sweeps {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const auto comma = std::min(v.find(',', pos), v.size());
    auto item = trim(v.substr(pos, comma - pos));
    if (!item.empty()) out.push_back(std::move(item));
    pos = comma + 1;
  }
  return out;
}

// RFC 4180 quoting, only when needed.
std::string cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (const char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::string opt(const std::optional<double>& v) { return v ? metrics::fmt(*v) : std::string(); }

}  // namespace

void SweepSpec::validate() const {
  if (name.empty()) throw SweepError("sweep has no sweep.name");
  if (axis.empty()) throw SweepError("sweep '" + name + "' has no sweep.axis");
  if (!config::has_key(axis) || axis == "preset" || axis == "calibration" || axis.rfind("output.", 0) == 0) {
    throw SweepError("sweep '" + name + "': '" + axis + "' cannot be an axis");
  }
  if (values.empty()) throw SweepError("sweep '" + name + "' has no axis values");
  if (presets.empty()) throw SweepError("sweep '" + name + "' selects no presets");
  for (const auto& p : presets) {
    if (!workload::is_preset(p)) throw SweepError("sweep '" + name + "': unknown preset '" + p + "'");
  }
  if (repetitions == 0) throw SweepError("sweep '" + name + "': sweep.repetitions must be at least 1");
  for (const auto& [k, v] : base) {
    if (k == "preset" || k == axis) throw SweepError("sweep '" + name + "': base may not set '" + k + "'");
  }
}

std::vector<std::string> presets_of(const std::vector<std::string>& services) {
  std::vector<std::string> out;
  for (const auto& p : workload::preset_names()) {
    const auto svc = workload::preset(p).service;
    if (std::find(services.begin(), services.end(), svc) != services.end()) out.push_back(p);
  }
  return out;
}

SweepSpec parse_spec(std::string_view text, std::string_view origin) {
  SweepSpec s;
  std::vector<std::string> services;
  std::size_t lineno = 0, pos = 0;
  const auto fail = [&](const std::string& msg) {
    throw SweepError(std::string(origin) + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (pos < text.size()) {
    const auto nl = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string l = trim(line);
    if (l.empty()) continue;
    const auto eq = l.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = trim(std::string_view(l).substr(0, eq));
    const std::string value = trim(std::string_view(l).substr(eq + 1));
    if (key == "sweep.name") {
      s.name = value;
    } else if (key == "sweep.axis") {
      s.axis = value;
    } else if (key == "sweep.values") {
      s.values = split_list(value);
    } else if (key == "sweep.presets") {
      s.presets = split_list(value);
    } else if (key == "sweep.services") {
      services = split_list(value);
      if (services.empty()) fail("empty sweep.services");
    } else if (key == "sweep.repetitions") {
      const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), s.repetitions);
      if (ec != std::errc() || p != value.data() + value.size()) fail("sweep.repetitions must be an integer");
    } else if (key.rfind("sweep.", 0) == 0) {
      fail("unknown sweep key '" + key + "'");
    } else if (!config::has_key(key)) {
      fail("unknown key '" + key + "'");
    } else {
      s.base.emplace_back(key, value);
    }
  }
  if (!services.empty()) {
    if (!s.presets.empty()) throw SweepError(std::string(origin) + ": give sweep.presets or sweep.services, not both");
    for (const auto& svc : services) {
      if (presets_of({svc}).empty()) throw SweepError(std::string(origin) + ": unknown service '" + svc + "'");
    }
    s.presets = presets_of(services);
  }
  s.validate();
  return s;
}

SweepSpec load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SweepError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str(), path);
}

std::uint64_t repetition_seed(std::uint64_t base_seed, std::uint64_t rep) {
  return rep == 0 ? base_seed : workload::SplitMix64::derive_seed(base_seed, rep);
}

std::vector<config::Assignment> point_assignments(const SweepSpec& spec, const std::string& value,
                                                  const std::string& preset, std::uint64_t rep) {
  std::vector<config::Assignment> a = spec.base;
  a.emplace_back("preset", preset);
  a.emplace_back(spec.axis, value);
  // The seed of rep 0 is whatever the base says (default config otherwise).
  const auto base_seed = std::stoull(config::get(config::build(a), "workload.seed"));
  a.emplace_back("workload.seed", std::to_string(repetition_seed(base_seed, rep)));
  return a;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned jobs) {
  spec.validate();
  std::vector<SweepRow> rows;
  for (const auto& v : spec.values) {
    for (const auto& p : spec.presets) {
      for (std::uint64_t r = 0; r < spec.repetitions; ++r) {
        SweepRow row;
        row.axis_value = v;
        row.preset = p;
        row.rep = r;
        rows.push_back(std::move(row));
      }
    }
  }

  const auto run_point = [&spec](SweepRow& row) {
    try {
      const auto cfg = config::build(point_assignments(spec, row.axis_value, row.preset, row.rep));
      row.seed = cfg.sim.mix.seed;
      row.fingerprint = config::fingerprint(cfg);
      row.report = metrics::finalize(cores::simulate(cfg.sim), row.fingerprint);
    } catch (const std::exception& e) {
      row.report.reset();
      row.error = e.what();
    }
  };

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) run_point(rows[i]);
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(rows.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Means over repetitions; a point with any failed repetition has none.
  struct Mean {
    double sim = 0, tput = 0;
    bool ok = true;
  };
  std::map<std::pair<std::string, std::string>, Mean> means;
  for (const auto& r : rows) {
    auto& m = means[{r.axis_value, r.preset}];
    if (!r.report) {
      m.ok = false;
      continue;
    }
    m.sim += static_cast<double>(r.report->sim_time_ps) / static_cast<double>(spec.repetitions);
    m.tput += r.report->throughput_rps / static_cast<double>(spec.repetitions);
  }
  for (auto& r : rows) {
    const auto& m = means[{r.axis_value, r.preset}];
    if (!m.ok) continue;
    r.mean_sim_time_ps = m.sim;
    r.mean_throughput_rps = m.tput;
    const auto& first = means[{spec.values.front(), r.preset}];
    if (!first.ok) continue;
    if (first.sim > 0) r.rel_exec_time = m.sim / first.sim;
    if (first.tput > 0) r.rel_throughput = m.tput / first.tput;
  }
  return rows;
}

std::string csv_header() {
  return "format,tool,version,sweep,axis,axis_value,preset,rep,seed,status,error,fingerprint,mode,"
         "requests_completed,sim_time_ps,throughput_rps,p50_ns,p99_ns,deser_fraction,rx_share,"
         "mean_sim_time_ps,mean_throughput_rps,rel_exec_time,rel_throughput\n";
}

std::string csv(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  std::ostringstream o;
  o << csv_header();
  for (const auto& r : rows) {
    o << kCsvFormat << ',' << kToolName << ',' << kToolVersion << ',' << cell(spec.name) << ',' << cell(spec.axis)
      << ',' << cell(r.axis_value) << ',' << r.preset << ',' << r.rep << ',' << r.seed << ','
      << (r.report ? "ok" : "error") << ',' << cell(r.error) << ',' << r.fingerprint << ',';
    if (r.report) {
      const auto& s = *r.report;
      o << s.mode << ',' << s.requests_completed << ',' << s.sim_time_ps << ',' << metrics::fmt(s.throughput_rps)
        << ',' << (s.latency.empty ? "" : metrics::fmt(s.latency.p50_ns)) << ','
        << (s.latency.empty ? "" : metrics::fmt(s.latency.p99_ns)) << ','
        << (s.has_engines ? metrics::fmt(s.deser_fraction()) : "") << ','
        << (s.has_engines ? metrics::fmt(s.rx_share()) : "") << ',';
    } else {
      o << ",,,,,,,,";
    }
    o << opt(r.mean_sim_time_ps) << ',' << opt(r.mean_throughput_rps) << ',' << opt(r.rel_exec_time) << ','
      << opt(r.rel_throughput) << '\n';
  }
  return o.str();
}

std::vector<std::string> profile_names() { return {"dagger_table"}; }

std::vector<ProfileCell> run_comparison_profile(std::string_view name, const std::vector<config::Assignment>& base) {
  if (name != "dagger_table") throw SweepError("unknown comparison profile '" + std::string(name) + "'");
  struct Def {
    const char* preset;
    const char* ops;
    double set_ratio;
    double target;
  };
  static const Def defs[] = {{"memc_tiny", "SET:0.5,GET:0.5", 0.5, 1.00},
                             {"memc_small", "SET:0.5,GET:0.5", 0.5, 0.91},
                             {"memc_tiny", "SET:0.05,GET:0.95", 0.05, 1.58},
                             {"memc_small", "SET:0.05,GET:0.95", 0.05, 1.47}};
  std::vector<ProfileCell> out;
  for (const auto& d : defs) {
    ProfileCell c;
    c.preset = d.preset;
    c.set_ratio = d.set_ratio;
    c.target_mrps = d.target;
    try {
      auto a = base;
      a.emplace_back("preset", d.preset);
      a.emplace_back("mode", "arcalis");
      a.emplace_back("workload.ops", d.ops);
      const auto cfg = config::build(a);
      c.fingerprint = config::fingerprint(cfg);
      c.mrps = metrics::finalize(cores::simulate(cfg.sim), c.fingerprint).throughput_rps / 1e6;
    } catch (const std::exception& e) {
      c.error = e.what();
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::string profile_csv(const std::vector<ProfileCell>& cells) {
  std::ostringstream o;
  o << "format,tool,version,profile,preset,set_ratio,status,error,fingerprint,mrps,target_mrps\n";
  for (const auto& c : cells) {
    o << kCsvFormat << ',' << kToolName << ',' << kToolVersion << ",dagger_table," << c.preset << ','
      << metrics::fmt(c.set_ratio) << ',' << (c.mrps ? "ok" : "error") << ',' << cell(c.error) << ','
      << c.fingerprint << ',' << opt(c.mrps) << ',' << metrics::fmt(c.target_mrps) << '\n';
  }
  return o.str();
}

}  // namespace arcsim::sweeps
