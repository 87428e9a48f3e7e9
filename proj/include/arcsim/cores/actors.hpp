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

#include "arcsim/accel/accelerator.hpp"
#include "arcsim/cores/business_logic.hpp"
#include "arcsim/cores/cost_models.hpp"
#include "arcsim/memmodel/memory_system.hpp"
#include "arcsim/simkern/kernel.hpp"

#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace arcsim::cores {

using kern::SimTime;

/// Sent by the NIC to its listeners when a packet lands in NetRecv.
inline constexpr std::uint32_t kNicWake = 0x101;

/// Counters of one simulated core. Every busy cycle is attributed to
/// exactly one stage bucket, so the buckets sum to busy_cycles.
struct CoreStats {
  std::string role;
  std::uint64_t instructions = 0;
  std::uint64_t header_parse = 0;
  std::uint64_t dispatch = 0;
  std::uint64_t deserialize = 0;
  std::uint64_t logic = 0;
  std::uint64_t header_create = 0;
  std::uint64_t serialize = 0;
  /// Packet I/O, record handoff, UC command traffic, fault handling.
  std::uint64_t io = 0;
  std::uint64_t busy_cycles = 0;
  /// Cycles stalled on a parked UC load.
  std::uint64_t stall_cycles = 0;
  std::uint64_t codec_calls = 0;
  /// Wire bytes read or written by software codec calls.
  std::uint64_t codec_bytes = 0;
  std::uint64_t uc_loads = 0;
  std::uint64_t uc_stores = 0;
  std::uint64_t packets = 0;
  std::uint64_t records = 0;
  std::uint64_t tokens = 0;
  std::uint64_t status_words = 0;
  std::uint64_t resends = 0;
  std::uint64_t page_faults = 0;
  std::uint64_t space_retries = 0;

  std::uint64_t stage_cycles() const {
    return header_parse + dispatch + deserialize + logic + header_create + serialize + io;
  }
  /// Cycles the core was not asleep.
  std::uint64_t active_cycles() const { return busy_cycles + stall_cycles; }
};

struct RxPacket {
  std::uint32_t index = 0;
  std::uint64_t vaddr = 0;
  std::size_t bytes = 0;
};

struct NicStats {
  std::uint64_t injected = 0;
  std::uint64_t drops = 0;
  std::uint64_t completed = 0;
  std::uint64_t errors = 0;
  /// Responses whose seq_id names no request of the trace.
  std::uint64_t unmatched = 0;
  SimTime last_egress;
};

/// NIC plus client: injects the request trace by DCA and takes responses
/// off the wire. Under closed loop a new request enters whenever one
/// leaves (or is dropped).
class Nic : public kern::Actor {
 public:
  enum Kind : std::uint32_t { kArrive = 1, kDelivered, kTransmit };

  Nic(mem::MemorySystem& mem, accel::HostShared& shared, std::vector<wire::Frame> requests,
      std::vector<SimTime> schedule, bool closed_loop);

  void bind(kern::Kernel& kernel, kern::ActorId self);
  void add_listener(kern::ActorId id) { listeners_.push_back(id); }
  /// Called after a NetResp slot is released (accelerated mode).
  void on_space(std::function<void()> fn) { on_space_ = std::move(fn); }
  void capture_responses(bool on) { capture_ = on; }
  void start();

  void handle(kern::Kernel& kernel, const kern::SimEvent& ev) override;
  bool idle() const override { return ring_.empty(); }
  std::string_view name() const override { return "nic"; }
  std::string_view kind_name(std::uint32_t kind) const override;

  std::deque<RxPacket>& ring() { return ring_; }
  kern::ActorId id() const { return self_; }
  const NicStats& stats() const { return stats_; }
  const std::vector<std::uint64_t>& latencies_ps() const { return latencies_; }
  std::vector<std::pair<std::uint32_t, wire::Frame>>& responses() { return responses_; }

 private:
  void issue_next();
  void arrive(std::uint32_t index);
  void transmit(std::uint64_t vaddr);

  mem::MemorySystem& mem_;
  accel::HostShared& shared_;
  std::vector<wire::Frame> requests_;
  std::vector<SimTime> schedule_;
  bool closed_loop_;
  kern::Kernel* kernel_ = nullptr;
  kern::ActorId self_ = 0;
  std::vector<kern::ActorId> listeners_;
  std::function<void()> on_space_;
  bool capture_ = false;
  std::size_t next_ = 0;
  std::vector<SimTime> ingress_;
  std::deque<RxPacket> ring_;
  NicStats stats_;
  std::vector<std::uint64_t> latencies_;
  std::vector<std::pair<std::uint32_t, wire::Frame>> responses_;
};

/// Shared plumbing of the core actors: cycle accounting and timed memory
/// accesses on the CPU clock.
class CoreActor : public kern::Actor {
 public:
  CoreActor(std::string name, mem::AgentId agent, mem::MemorySystem& mem);

  void bind(kern::Kernel& kernel, kern::ActorId self);
  std::string_view name() const override { return name_; }
  const CoreStats& stats() const { return stats_; }
  kern::ActorId id() const { return self_; }

 protected:
  std::uint64_t ns_cycles(std::uint64_t ns) const;
  std::uint64_t access(std::uint64_t vaddr, std::size_t size, mem::AccessKind kind);
  SimTime cycles_time(std::uint64_t cycles) const;
  /// Marks the core busy for `cycles` from now and schedules `kind`.
  void busy_for(std::uint64_t cycles, std::uint32_t kind, std::uint64_t arg0 = 0);
  void add(std::uint64_t& bucket, std::uint64_t cycles) {
    bucket += cycles;
    stats_.busy_cycles += cycles;
  }

  std::string name_;
  mem::AgentId agent_;
  mem::MemorySystem& mem_;
  kern::Kernel* kernel_ = nullptr;
  kern::ActorId self_ = 0;
  CoreStats stats_;
};

/// Packet I/O core of the accelerated mode.
class NetCore : public CoreActor {
 public:
  enum Kind : std::uint32_t { kStepDone = 1, kWake = kNicWake, kLoadReturn = accel::kUcLoadResponse };

  NetCore(mem::AgentId agent, mem::MemorySystem& mem, accel::HostShared& shared, Nic& nic,
          const accel::Accelerator& acc, const HostConfig& host);

  void handle(kern::Kernel& kernel, const kern::SimEvent& ev) override;
  bool idle() const override;
  std::string_view kind_name(std::uint32_t kind) const override;

 private:
  struct Desc {
    std::uint64_t vaddr;
    std::size_t bytes;
  };
  void step();
  void park();
  void on_word(std::uint64_t word);
  void prune();
  SimTime post_store(SimTime at, std::uint64_t payload, accel::CommandType op);

  accel::HostShared& shared_;
  Nic& nic_;
  const accel::Accelerator& acc_;
  HostConfig host_;
  enum class State : std::uint8_t { Asleep, Busy, Parked } state_ = State::Asleep;
  SimTime parked_at_;
  std::deque<Desc> sent_;
  std::deque<Desc> resend_;
  std::uint64_t pruned_ = 0;
  std::uint64_t outstanding_ = 0;
};

/// Business-logic core of the accelerated mode. It never touches wire
/// bytes: requests arrive as records, responses leave as records.
class AppCore : public CoreActor {
 public:
  enum Kind : std::uint32_t { kStart = 1, kRecordDone, kFaultDone, kRetry, kLoadReturn = accel::kUcLoadResponse };

  AppCore(mem::AgentId agent, mem::MemorySystem& mem, accel::HostShared& shared, accel::Accelerator& acc,
          ServiceLogic& logic, const HostConfig& host);

  void handle(kern::Kernel& kernel, const kern::SimEvent& ev) override;
  bool idle() const override { return state_ != State::Busy && todo_ == 0 && !stash_; }
  std::string_view kind_name(std::uint32_t kind) const override;

 private:
  struct Desc {
    std::uint64_t vaddr;
    std::size_t bytes;
  };
  void park();
  void next_record();
  void finish_record();
  void on_word(std::uint64_t word);
  void prune();
  void send(const Desc& d, SimTime at);

  accel::HostShared& shared_;
  accel::Accelerator& acc_;
  ServiceLogic& logic_;
  HostConfig host_;
  enum class State : std::uint8_t { Idle, Busy, Parked } state_ = State::Idle;
  SimTime parked_at_;
  std::size_t todo_ = 0;
  /// A response computed but not yet written (AppResp was full).
  struct Stash {
    wire::RpcMessage response;
    std::uint64_t io = 0;
    std::uint64_t logic = 0;
  };
  std::optional<Stash> stash_;
  std::deque<Desc> sent_;
  std::deque<Desc> resend_;
  std::uint64_t pruned_ = 0;
};

/// A core running the whole RPC stack in software.
class BaselineCore : public CoreActor {
 public:
  enum Kind : std::uint32_t { kDone = 1, kRetry, kWake = kNicWake };

  BaselineCore(std::string name, mem::AgentId agent, mem::MemorySystem& mem, accel::HostShared& shared, Nic& nic,
               const wire::ServiceSchema& schema, ServiceLogic& logic, const CpuRpcCostModel& cpu,
               const HostConfig& host);

  void handle(kern::Kernel& kernel, const kern::SimEvent& ev) override;
  bool idle() const override { return !busy_; }
  std::string_view kind_name(std::uint32_t kind) const override;

 private:
  struct Pending {
    RxPacket packet;
    wire::Frame response;
    std::size_t resp_fields = 0;
    bool is_error = false;
  };
  void run();
  void finish_output();

  accel::HostShared& shared_;
  Nic& nic_;
  const wire::ServiceSchema& schema_;
  ServiceLogic& logic_;
  CpuRpcCostModel cpu_;
  HostConfig host_;
  bool busy_ = false;
  std::optional<Pending> pending_;
  std::uint64_t out_vaddr_ = 0;
  std::uint64_t chunk_cycles_ = 0;
};

}  // namespace arcsim::cores
