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
// arcsim command line: run, compare, sweep, schema, trace.
//
// Exit status: 0 on success, 1 for usage and configuration errors, 2 when a
// simulation invariant is violated.

#include "CLI11.hpp"

#include "arcsim/config/config.hpp"
#include "arcsim/metrics/report.hpp"
#include "arcsim/sweeps/sweep.hpp"
#include "arcsim/wirecodec/schema.hpp"
#include "arcsim/workload/workload.hpp"
#include "arcsim_version.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace arcsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvariant = 2;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out.flush()) throw IoError("cannot write " + path);
}

/// Assignments in command-line order; `--config` files expand in place.
struct Overrides {
  std::vector<config::Assignment> list;

  void attach(CLI::App* cmd, bool with_run_aliases) {
    cmd->add_option_function<std::vector<std::string>>(
           "--config",
           [this](const std::vector<std::string>& paths) {
             for (const auto& p : paths) {
               const auto a = config::load_assignments(p);
               list.insert(list.end(), a.begin(), a.end());
             }
           },
           "configuration file (key = value lines); may repeat")
        ->trigger_on_parse()
        ->type_name("FILE");
    alias(cmd, "--requests", "workload.requests", "number of requests");
    alias(cmd, "--seed", "workload.seed", "workload seed");
    if (with_run_aliases) {
      alias(cmd, "--output", "output.report", "report file (default stdout)");
      alias(cmd, "--trace", "output.trace", "event trace file");
    }
    for (const auto& k : config::keys()) {
      if (!with_run_aliases && k.name.rfind("output.", 0) == 0) continue;
      alias(cmd, "--" + k.name, k.name, k.doc);
    }
  }

 private:
  void alias(CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& doc) {
    cmd->add_option_function<std::string>(
           flag, [this, key](const std::string& v) { list.emplace_back(key, v); }, doc)
        ->trigger_on_parse()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->type_name("VALUE");
  }
};

std::string trace_file_text(const std::string& fingerprint, const std::string& body) {
  return std::string("# tool=") + kToolName + " version=" + kToolVersion + " fingerprint=" + fingerprint +
         "\ntime_ps,actor,event\n" + body;
}

int cmd_run(const Overrides& o) {
  auto cfg = config::build(o.list);
  cfg.sim.trace_events = !cfg.output_trace.empty();
  const auto fp = config::fingerprint(cfg);
  const auto result = cores::simulate(cfg.sim);
  const auto report = metrics::finalize(result, fp);
  write_out(cfg.output_report, report.to_kv());
  if (!cfg.output_trace.empty()) write_out(cfg.output_trace, trace_file_text(fp, result.trace));
  return kExitOk;
}

int cmd_trace(const Overrides& o, const std::string& out) {
  auto cfg = config::build(o.list);
  cfg.sim.trace_events = true;
  const auto fp = config::fingerprint(cfg);
  const auto result = cores::simulate(cfg.sim);
  metrics::finalize(result, fp);  // invariants still apply
  write_out(out, trace_file_text(fp, result.trace));
  return kExitOk;
}

int cmd_compare(const Overrides& o, std::vector<std::string> presets, const std::string& out_dir) {
  if (presets.empty()) presets = {"memc_low", "memc_mid", "memc_high", "post_low", "post_mid", "post_high", "unique_id"};
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  std::string table = metrics::ComparisonReport::csv_header() + "\n";
  std::printf("%-12s %9s %14s %14s %11s %11s\n", "preset", "speedup", "baseline_mrps", "arcalis_mrps", "instr_red",
              "cycle_red");
  for (const auto& p : presets) {
    auto a = o.list;
    a.emplace_back("preset", p);
    a.emplace_back("mode", "baseline");
    const auto bcfg = config::build(a);
    a.back().second = "arcalis";
    const auto acfg = config::build(a);
    // Both modes replay one trace.
    const auto trace = workload::generate(bcfg.sim.mix);
    const auto b = metrics::finalize(cores::simulate(bcfg.sim, trace), config::fingerprint(bcfg));
    const auto x = metrics::finalize(cores::simulate(acfg.sim, trace), config::fingerprint(acfg));
    const auto c = metrics::compare(b, x);
    table += c.csv_row() + "\n";
    std::printf("%-12s %9.3f %14.4f %14.4f %10.1f%% %10.1f%%\n", p.c_str(), c.speedup, b.throughput_rps / 1e6,
                x.throughput_rps / 1e6, 100 * c.instruction_reduction, 100 * c.cycle_reduction);
    if (!out_dir.empty()) {
      write_out(out_dir + "/" + p + ".csv",
                metrics::StatsReport::csv_header() + "\n" + b.csv_row() + "\n" + x.csv_row() + "\n");
    }
  }
  if (!out_dir.empty()) write_out(out_dir + "/comparison.csv", table);
  return kExitOk;
}

int cmd_sweep(const Overrides& o, const std::string& spec_path, const std::string& profile, unsigned jobs,
              const std::string& out) {
  if (spec_path.empty() == profile.empty()) throw CLI::ValidationError("sweep", "give a spec file or --profile");
  std::size_t failed = 0;
  if (!profile.empty()) {
    const auto cells = sweeps::run_comparison_profile(profile, o.list);
    for (const auto& c : cells) failed += !c.mrps;
    write_out(out, sweeps::profile_csv(cells));
  } else {
    auto spec = sweeps::load_spec(spec_path);
    spec.base.insert(spec.base.end(), o.list.begin(), o.list.end());
    spec.validate();
    const auto rows = sweeps::run_sweep(spec, jobs);
    for (const auto& r : rows) failed += !r.report;
    write_out(out, sweeps::csv(spec, rows));
  }
  if (failed > 0) std::cerr << "arcsim: " << failed << " point(s) failed; see the error column\n";
  return kExitOk;
}

int cmd_schema(const std::string& service) {
  if (!service.empty()) {
    const auto names = wire::builtin_schema_names();
    if (std::find(names.begin(), names.end(), service) == names.end()) throw config::ConfigError("unknown service '" + service + "'");
    std::cout << wire::builtin_schema_text(service);
    return kExitOk;
  }
  bool first = true;
  for (const auto& name : wire::builtin_schema_names()) {
    if (!first) std::cout << '\n';
    first = false;
    std::cout << wire::builtin_schema_text(name);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator of a near-cache RPC accelerator and a CPU-only baseline", kToolName};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(0, 1);
  bool list_keys = false;
  app.add_flag("--list-keys", list_keys, "print every configuration key and exit");

  Overrides run_o, cmp_o, sweep_o, trace_o;
  auto* run = app.add_subcommand("run", "simulate one configuration and write its report");
  run_o.attach(run, true);

  auto* cmp = app.add_subcommand("compare", "run baseline and accelerated modes on the same trace");
  cmp_o.attach(cmp, false);
  std::vector<std::string> cmp_presets;
  std::string cmp_dir;
  cmp->add_option("--presets", cmp_presets, "presets to compare (default: the seven speedup presets)")
      ->delimiter(',');
  cmp->add_option("--out-dir", cmp_dir, "directory for comparison.csv and per-preset chart data");

  auto* sweep = app.add_subcommand("sweep", "run a sweep spec or a comparison profile, write CSV");
  sweep_o.attach(sweep, false);
  std::string spec_path, profile, sweep_out;
  unsigned jobs = 1;
  sweep->add_option("spec", spec_path, "sweep spec file");
  sweep->add_option("--profile", profile, "comparison profile (dagger_table)");
  sweep->add_option("--jobs", jobs, "simulation instances run at once")->check(CLI::Range(1u, 256u));
  sweep->add_option("-o,--out", sweep_out, "CSV file (default stdout)");

  auto* schema = app.add_subcommand("schema", "print the service schemas");
  std::string service;
  schema->add_option("service", service, "memcached, post_storage or unique_id");

  auto* trace = app.add_subcommand("trace", "simulate and dump the event trace");
  trace_o.attach(trace, false);
  std::string trace_out;
  trace->add_option("-o,--out", trace_out, "trace file (default stdout)");

  try {
    app.parse(argc, argv);
    if (list_keys) {
      for (const auto& k : config::keys()) std::cout << k.name << '\t' << k.doc << '\n';
      return kExitOk;
    }
    if (run->parsed()) return cmd_run(run_o);
    if (cmp->parsed()) return cmd_compare(cmp_o, cmp_presets, cmp_dir);
    if (sweep->parsed()) return cmd_sweep(sweep_o, spec_path, profile, jobs, sweep_out);
    if (schema->parsed()) return cmd_schema(service);
    if (trace->parsed()) return cmd_trace(trace_o, trace_out);
    std::cout << app.help();
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  } catch (const kern::SimulationError& e) {
    std::cerr << "arcsim: invariant violated: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::invalid_argument& e) {  // config, sweep spec, workload mix
    std::cerr << "arcsim: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "arcsim: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "arcsim: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "arcsim: internal error: " << e.what() << '\n';
    return kExitInvariant;
  }
}
