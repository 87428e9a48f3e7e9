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
#include "arcsim/metrics/report.hpp"

#include "arcsim/workload/rng.hpp"
#include "arcsim_version.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace arcsim::metrics {

std::string fmt(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

Percentiles percentiles(std::vector<std::uint64_t> samples) {
  Percentiles p;
  if (samples.empty()) return p;
  std::sort(samples.begin(), samples.end());
  const auto rank = [&](double q) {
    const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size()) - 1e-9));
    return static_cast<double>(samples[std::clamp<std::size_t>(k, 1, samples.size()) - 1]) / 1000.0;
  };
  p.empty = false;
  p.p50_ns = rank(0.50);
  p.p95_ns = rank(0.95);
  p.p99_ns = rank(0.99);
  return p;
}

namespace {

double ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

EngineReport engine_report(const accel::EngineStats& s, const kern::ClockDomain& clock) {
  EngineReport e;
  e.header_parse = s.header_parse;
  e.dispatch = s.dispatch;
  e.deserialize = s.deserialize;
  e.header_create = s.header_create;
  e.serialize = s.serialize;
  e.error_path = s.error_path;
  e.busy_cycles = clock.time_to_cycles_ceil(kern::SimTime{s.busy_ps});
  e.rpcs = s.rpcs;
  e.errors = s.errors;
  return e;
}

std::uint64_t five_stage(const EngineReport& rx, const EngineReport& tx) {
  return rx.header_parse + rx.dispatch + rx.deserialize + tx.header_create + tx.serialize;
}

class KvWriter {
 public:
  void put(const std::string& k, const std::string& v) { out_ << k << '=' << v << '\n'; }
  void put(const std::string& k, std::uint64_t v) { put(k, std::to_string(v)); }
  void put(const std::string& k, double v) { put(k, fmt(v)); }
  void put(const std::string& k, bool v) { put(k, std::string(v ? "true" : "false")); }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

void put_memory(KvWriter& w, const mem::MemoryStats& m) {
  w.put("cache.l1.hits", m.l1_hits);
  w.put("cache.l1.misses", m.l1_misses);
  w.put("cache.l2.hits", m.l2_hits);
  w.put("cache.l2.misses", m.l2_misses);
  w.put("cache.llc.hits", m.llc_hits);
  w.put("cache.llc.misses", m.llc_misses);
  w.put("cache.accel.hits", m.accel_hits);
  w.put("cache.accel.misses", m.accel_misses);
  w.put("cache.dram_accesses", m.dram_accesses);
  w.put("cache.coherence_transfers", m.coherence_transfers);
  w.put("tlb.hits", m.tlb_hits);
  w.put("tlb.misses", m.tlb_misses);
  w.put("tlb.faults", m.tlb_faults);
  w.put("host.page_faults", m.host_page_faults);
  w.put("dca.packets", m.dca_packets);
  w.put("dca.lines", m.dca_lines);
  w.put("dca.bytes", m.dca_bytes);
  w.put("dca.drops", m.dca_drops);
}

}  // namespace

double StatsReport::deser_fraction() const {
  return ratio(static_cast<double>(rx.dispatch + rx.deserialize), static_cast<double>(five_stage(rx, tx)));
}

double StatsReport::rx_share() const {
  return ratio(static_cast<double>(rx.header_parse + rx.dispatch + rx.deserialize),
               static_cast<double>(five_stage(rx, tx)));
}

const ActorReport& StatsReport::logic_actor() const {
  for (const auto& a : actors) {
    if (a.name == "appcore") return a;
  }
  if (actors.empty()) throw std::logic_error("report has no actors");
  return actors.front();
}

StatsReport finalize(const cores::RunResult& run, const std::string& fingerprint) {
  StatsReport r;
  r.tool = kToolName;
  r.version = kToolVersion;
  r.fingerprint = fingerprint;
  r.mode = std::string(cores::to_string(run.mode));
  r.preset = run.preset;
  r.service = run.service;
  r.seed = run.seed;
  r.prng = workload::SplitMix64::kAlgorithm;

  r.requests_injected = run.nic.injected;
  r.requests_completed = run.nic.completed;
  r.drops = run.nic.drops;
  r.errors = run.nic.errors;
  if (r.requests_injected != r.requests_completed + r.drops + r.errors) {
    throw ConservationViolation("conservation violated: injected " + std::to_string(r.requests_injected) +
                                " != completed " + std::to_string(r.requests_completed) + " + drops " +
                                std::to_string(r.drops) + " + errors " + std::to_string(r.errors));
  }
  if (r.requests_injected != run.requests) {
    throw ConservationViolation("run stopped after injecting " + std::to_string(r.requests_injected) + " of " +
                                std::to_string(run.requests) + " requests");
  }
  if (!run.quiescent || run.accel_in_flight != 0 || run.buffer_residue != 0) {
    throw ConservationViolation("work left at quiescence: in-flight " + std::to_string(run.accel_in_flight) +
                                ", buffered bytes " + std::to_string(run.buffer_residue));
  }

  r.sim_time_ps = run.sim_time.ps;
  r.throughput_rps = run.sim_time.ps > 0 ? static_cast<double>(r.requests_completed) / run.sim_time.seconds() : 0.0;
  r.latency = percentiles(run.latencies_ps);

  for (const auto& c : run.cores) {
    ActorReport a;
    a.name = c.role;
    a.header_parse = c.header_parse;
    a.dispatch = c.dispatch;
    a.deserialize = c.deserialize;
    a.logic = c.logic;
    a.header_create = c.header_create;
    a.serialize = c.serialize;
    a.io = c.io;
    a.busy_cycles = c.busy_cycles;
    a.stall_cycles = c.stall_cycles;
    a.instructions = c.instructions;
    a.codec_calls = c.codec_calls;
    a.codec_bytes = c.codec_bytes;
    if (a.stage_sum() != a.busy_cycles) throw kern::SimulationError("cycle attribution broken for " + a.name);
    r.actors.push_back(a);
  }
  if (run.accel) {
    const kern::ClockDomain clock("accel", run.accel_freq_hz);
    r.has_engines = true;
    r.rx = engine_report(run.accel->rx, clock);
    r.tx = engine_report(run.accel->tx, clock);
    if (r.rx.stage_sum() > r.rx.busy_cycles || r.tx.stage_sum() > r.tx.busy_cycles) {
      throw kern::SimulationError("engine stage cycles exceed busy cycles");
    }
    r.simultaneous_busy = run.accel->simultaneous_busy;
    r.overflow_events = run.accel->overflow_events;
    r.rejected_commands = run.accel->rejected_commands;
    r.status_words = run.accel->status_words;
    r.tokens = run.accel->tokens;
    r.accel_page_faults = run.accel->page_faults;
    r.fsm_legal = run.transitions.subset_of_legal();
  }
  r.memory = run.memory;
  return r;
}

std::string StatsReport::to_kv() const {
  KvWriter w;
  w.put("tool", tool);
  w.put("version", version);
  w.put("fingerprint", fingerprint);
  w.put("mode", mode);
  w.put("preset", preset);
  w.put("service", service);
  w.put("seed", seed);
  w.put("prng", prng);
  w.put("requests_injected", requests_injected);
  w.put("requests_completed", requests_completed);
  w.put("drops", drops);
  w.put("errors", errors);
  w.put("sim_time_ps", sim_time_ps);
  w.put("throughput_rps", throughput_rps);
  w.put("latency.empty", latency.empty);
  w.put("latency.p50_ns", latency.p50_ns);
  w.put("latency.p95_ns", latency.p95_ns);
  w.put("latency.p99_ns", latency.p99_ns);
  for (const auto& a : actors) {
    const std::string p = "actor." + a.name + ".";
    w.put(p + "header_parse", a.header_parse);
    w.put(p + "dispatch", a.dispatch);
    w.put(p + "deserialize", a.deserialize);
    w.put(p + "logic", a.logic);
    w.put(p + "header_create", a.header_create);
    w.put(p + "serialize", a.serialize);
    w.put(p + "io", a.io);
    w.put(p + "busy_cycles", a.busy_cycles);
    w.put(p + "stall_cycles", a.stall_cycles);
    w.put(p + "instructions", a.instructions);
    w.put(p + "codec_calls", a.codec_calls);
    w.put(p + "codec_bytes", a.codec_bytes);
  }
  if (has_engines) {
    for (const auto* e : {&rx, &tx}) {
      const std::string p = e == &rx ? "engine.rx." : "engine.tx.";
      w.put(p + "header_parse", e->header_parse);
      w.put(p + "dispatch", e->dispatch);
      w.put(p + "deserialize", e->deserialize);
      w.put(p + "header_create", e->header_create);
      w.put(p + "serialize", e->serialize);
      w.put(p + "error_path", e->error_path);
      w.put(p + "busy_cycles", e->busy_cycles);
      w.put(p + "rpcs", e->rpcs);
      w.put(p + "errors", e->errors);
    }
    w.put("engine.deser_fraction", deser_fraction());
    w.put("engine.rx_share", rx_share());
    w.put("engine.simultaneous_busy", simultaneous_busy);
    w.put("accel.overflow_events", overflow_events);
    w.put("accel.rejected_commands", rejected_commands);
    w.put("accel.status_words", status_words);
    w.put("accel.tokens", tokens);
    w.put("accel.page_faults", accel_page_faults);
    w.put("accel.fsm_legal", fsm_legal);
  }
  put_memory(w, memory);
  return w.str();
}

std::string StatsReport::csv_header() {
  return "tool,version,fingerprint,mode,preset,service,seed,prng,requests_injected,requests_completed,drops,errors,"
         "sim_time_ps,throughput_rps,p50_ns,p95_ns,p99_ns,logic_core_instructions,logic_core_active_cycles,"
         "deser_fraction,rx_share,accel_hits,accel_misses,llc_hits,llc_misses,tlb_hits,tlb_misses,tlb_faults";
}

std::string StatsReport::csv_row() const {
  std::ostringstream o;
  const ActorReport& a = logic_actor();
  o << tool << ',' << version << ',' << fingerprint << ',' << mode << ',' << preset << ',' << service << ',' << seed
    << ',' << prng << ',' << requests_injected << ',' << requests_completed << ',' << drops << ',' << errors << ','
    << sim_time_ps << ',' << fmt(throughput_rps) << ',' << fmt(latency.p50_ns) << ',' << fmt(latency.p95_ns) << ','
    << fmt(latency.p99_ns) << ',' << a.instructions << ',' << a.active_cycles() << ','
    << (has_engines ? fmt(deser_fraction()) : "") << ',' << (has_engines ? fmt(rx_share()) : "") << ','
    << memory.accel_hits << ',' << memory.accel_misses << ',' << memory.llc_hits << ',' << memory.llc_misses << ','
    << memory.tlb_hits << ',' << memory.tlb_misses << ',' << memory.tlb_faults;
  return o.str();
}

ComparisonReport compare(const StatsReport& b, const StatsReport& a) {
  if (b.preset != a.preset || b.service != a.service || b.seed != a.seed ||
      b.requests_injected != a.requests_injected) {
    throw MismatchedRuns("runs differ in workload: " + b.preset + "/" + std::to_string(b.seed) + " vs " + a.preset +
                         "/" + std::to_string(a.seed));
  }
  ComparisonReport c;
  c.preset = b.preset;
  c.seed = b.seed;
  c.baseline_fingerprint = b.fingerprint;
  c.arcalis_fingerprint = a.fingerprint;
  c.speedup = ratio(static_cast<double>(b.sim_time_ps), static_cast<double>(a.sim_time_ps));
  c.throughput_ratio = ratio(a.throughput_rps, b.throughput_rps);
  const ActorReport& lb = b.logic_actor();
  const ActorReport& la = a.logic_actor();
  auto reduction = [](double before, double after) { return before > 0 ? 1.0 - after / before : 0.0; };
  c.instruction_reduction =
      reduction(static_cast<double>(lb.instructions), static_cast<double>(la.instructions));
  c.cycle_reduction = reduction(static_cast<double>(lb.active_cycles()), static_cast<double>(la.active_cycles()));
  std::uint64_t bytes_b = 0, bytes_a = 0;
  for (const auto& x : b.actors) bytes_b += x.codec_bytes;
  for (const auto& x : a.actors) bytes_a += x.codec_bytes;
  c.codec_byte_reduction = reduction(static_cast<double>(bytes_b), static_cast<double>(bytes_a));
  return c;
}

std::string ComparisonReport::to_kv() const {
  KvWriter w;
  w.put("tool", std::string(kToolName));
  w.put("version", std::string(kToolVersion));
  w.put("preset", preset);
  w.put("seed", seed);
  w.put("baseline.fingerprint", baseline_fingerprint);
  w.put("arcalis.fingerprint", arcalis_fingerprint);
  w.put("speedup", speedup);
  w.put("throughput_ratio", throughput_ratio);
  w.put("instruction_reduction", instruction_reduction);
  w.put("cycle_reduction", cycle_reduction);
  w.put("codec_byte_reduction", codec_byte_reduction);
  return w.str();
}

std::string ComparisonReport::csv_header() {
  return "tool,version,preset,seed,baseline_fingerprint,arcalis_fingerprint,speedup,throughput_ratio,instruction_reduction,"
         "cycle_reduction,codec_byte_reduction";
}

std::string ComparisonReport::csv_row() const {
  std::ostringstream o;
  o << kToolName << ',' << kToolVersion << ',' << preset << ',' << seed << ',' << baseline_fingerprint << ',' << arcalis_fingerprint << ',' << fmt(speedup)
    << ',' << fmt(throughput_ratio) << ',' << fmt(instruction_reduction) << ',' << fmt(cycle_reduction) << ','
    << fmt(codec_byte_reduction);
  return o.str();
}

}  // namespace arcsim::metrics
