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
#include "arcsim/cores/simulation.hpp"

#include <stdexcept>

namespace arcsim::cores {

std::string_view to_string(Mode m) { return m == Mode::Baseline ? "baseline" : "arcalis"; }

std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "baseline") return Mode::Baseline;
  if (s == "arcalis") return Mode::Arcalis;
  return std::nullopt;
}

void SimConfig::validate() const {
  latency.validate();
  memory.validate();
  accel.validate();
  host.validate();
  cpu.validate();
  logic.validate();
  mix.validate();
  load.validate();
}

const CoreStats& RunResult::logic_core() const {
  for (const auto& c : cores) {
    if (c.role == "appcore") return c;
  }
  if (cores.empty()) throw std::logic_error("run has no cores");
  return cores.front();
}

RunResult simulate(const SimConfig& cfg) {
  cfg.validate();
  return simulate(cfg, workload::generate(cfg.mix));
}

RunResult simulate(const SimConfig& cfg, const workload::RequestTrace& trace) {
  cfg.validate();
  const wire::ServiceSchema& schema = wire::builtin_schema(trace.service);
  const bool accelerated = cfg.mode == Mode::Arcalis;
  const std::size_t ncores = accelerated ? 2 : cfg.host.baseline_cores;

  mem::MemorySystem memory(cfg.latency, cfg.memory, ncores);
  accel::HostShared shared;
  kern::Kernel kernel;
  kernel.enable_trace(cfg.trace_events);

  std::vector<wire::Frame> frames;
  frames.reserve(trace.entries.size());
  for (const auto& e : trace.entries) frames.push_back(wire::serialize(e.message, schema));
  Nic nic(memory, shared, std::move(frames), workload::offered_load(trace, cfg.load),
          cfg.load.mode == workload::LoadMode::ClosedLoop);
  nic.capture_responses(cfg.capture_responses);
  nic.bind(kernel, kernel.register_actor(nic));

  ServiceParams params;
  params.seed = cfg.mix.seed;
  params.keyspace_n = cfg.mix.keyspace_n;
  params.value_size = cfg.mix.value_size;
  params.text_size = cfg.mix.text_size;
  const auto logic = ServiceLogic::create(schema, cfg.logic, params);

  std::unique_ptr<accel::Accelerator> acc;
  std::unique_ptr<NetCore> net;
  std::unique_ptr<AppCore> app;
  std::vector<std::unique_ptr<BaselineCore>> base;
  if (accelerated) {
    acc = std::make_unique<accel::Accelerator>(memory, schema, cfg.accel, shared);
    net = std::make_unique<NetCore>(0, memory, shared, nic, *acc, cfg.host);
    app = std::make_unique<AppCore>(1, memory, shared, *acc, *logic, cfg.host);
    net->bind(kernel, kernel.register_actor(*net));
    app->bind(kernel, kernel.register_actor(*app));
    acc->bind(kernel, kernel.register_actor(*acc));
    nic.add_listener(net->id());
    nic.on_space([&acc] { acc->notify_space(); });
    kernel.schedule(kern::SimTime{}, app->id(), AppCore::kStart);
  } else {
    for (std::size_t i = 0; i < ncores; ++i) {
      const std::string name = ncores == 1 ? "baseline" : "baseline" + std::to_string(i);
      base.push_back(std::make_unique<BaselineCore>(name, static_cast<mem::AgentId>(i), memory, shared, nic, schema,
                                                    *logic, cfg.cpu, cfg.host));
      base.back()->bind(kernel, kernel.register_actor(*base.back()));
      nic.add_listener(base.back()->id());
    }
  }
  nic.start();
  kernel.run_until();

  RunResult r;
  r.mode = cfg.mode;
  r.service = trace.service;
  r.preset = cfg.mix.name;
  r.seed = cfg.mix.seed;
  r.requests = trace.entries.size();
  r.nic = nic.stats();
  r.sim_time = nic.stats().last_egress;
  r.end_time = kernel.now();
  r.quiescent = kernel.quiescent();
  r.events = kernel.events_processed();
  r.latencies_ps = nic.latencies_ps();
  if (accelerated) {
    r.cores = {net->stats(), app->stats()};
    r.accel = acc->stats();
    r.transitions = acc->transitions();
    r.accel_in_flight = acc->in_flight_rpcs();
  } else {
    for (const auto& b : base) r.cores.push_back(b->stats());
  }
  for (std::size_t b = 0; b < mem::kBufferCount; ++b) {
    r.buffer_residue += memory.buffer(static_cast<mem::BufferId>(b)).occupancy();
  }
  r.memory = memory.stats();
  r.cpu_freq_hz = cfg.latency.cpu_freq_hz;
  r.accel_freq_hz = cfg.latency.accel_freq_hz;
  r.responses = std::move(nic.responses());
  if (cfg.trace_events) r.trace = kernel.trace_text();
  return r;
}

}  // namespace arcsim::cores
