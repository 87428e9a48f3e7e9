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

#include "arcsim/accel/command.hpp"
#include "arcsim/accel/engine_model.hpp"
#include "arcsim/accel/fsm.hpp"
#include "arcsim/memmodel/memory_system.hpp"
#include "arcsim/simkern/kernel.hpp"
#include "arcsim/wirecodec/schema.hpp"

#include <deque>
#include <optional>

namespace arcsim::accel {

/// Event kind delivered to a core when its parked UC load completes;
/// arg0 carries the returned word.
inline constexpr std::uint32_t kUcLoadResponse = 0x100;

struct AccelConfig {
  EngineCostModel cost;
  std::size_t pending_depth = 16;
  /// Upper bound on entries handed out by one completion token.
  std::uint32_t app_batch_max = 16;
  std::uint32_t net_batch_max = 32;
  WatchRange watch;

  void validate() const;
};

struct EngineStats {
  std::uint64_t header_parse = 0;
  std::uint64_t dispatch = 0;
  std::uint64_t deserialize = 0;
  std::uint64_t header_create = 0;
  std::uint64_t serialize = 0;
  /// Cycles spent creating error frames.
  std::uint64_t error_path = 0;
  std::uint64_t busy_ps = 0;
  std::uint64_t rpcs = 0;
  std::uint64_t errors = 0;
  std::uint64_t drains = 0;
  std::uint64_t fault_stalls = 0;
  std::uint64_t space_stalls = 0;

  std::uint64_t stage_cycles() const {
    return header_parse + dispatch + deserialize + header_create + serialize + error_path;
  }
};

struct AccelStats {
  EngineStats rx;
  EngineStats tx;
  SnoopStats snoop;
  std::uint64_t rejected_commands = 0;
  std::uint64_t overflow_events = 0;
  std::uint64_t status_words = 0;
  std::uint64_t tokens = 0;
  std::uint64_t page_faults = 0;
  std::uint64_t simultaneous_busy = 0;
};

/// The accelerator: snooping command interface, descriptor pairing,
/// parked-load bookkeeping and the two micro-engines.
class Accelerator : public kern::Actor {
 public:
  enum Kind : std::uint32_t {
    kUcStore = 1,  // arg0 = data word, arg1 = physical address
    kUcLoad,       // arg0 = physical address, arg1 = requesting actor
    kRxWorkDone,
    kRxDrained,
    kRxCleanup,
    kTxWorkDone,
    kTxDrained,
    kTxCleanup,
  };

  Accelerator(mem::MemorySystem& mem, const wire::ServiceSchema& schema, const AccelConfig& cfg,
              HostShared& shared);

  /// Must be called once after registration with the kernel.
  void bind(kern::Kernel& kernel, kern::ActorId self);

  void handle(kern::Kernel& kernel, const kern::SimEvent& ev) override;
  bool idle() const override;
  std::string_view name() const override { return "accel"; }
  std::string_view kind_name(std::uint32_t kind) const override;

  /// A core freed space in AppRecv or NetResp; stalled engines retry.
  void notify_space();

  const AccelStats& stats() const { return stats_; }
  const TransitionLog& transitions() const { return transitions_; }
  EngineState rx_state() const { return rx_.state; }
  EngineState tx_state() const { return tx_.state; }
  std::size_t rx_pending() const { return rx_.pending.size(); }
  std::size_t tx_pending() const { return tx_.pending.size(); }
  /// Requests held anywhere inside the accelerator.
  std::size_t in_flight_rpcs() const;
  const AccelConfig& config() const { return cfg_; }
  std::uint64_t watch_base() const { return cfg_.watch.base; }
  kern::ActorId id() const { return self_; }

 private:
  struct Job {
    std::uint64_t vaddr = 0;
    std::uint64_t len = 0;
  };
  enum class Wait : std::uint8_t { None, Fault, Space };
  enum class ChannelId : std::uint8_t { Net, App };
  struct Publish {
    ChannelId channel = ChannelId::App;
    std::uint64_t vaddr = 0;
    std::size_t bytes = 0;
    bool is_frame = false;
    wire::Frame frame;
    wire::RpcMessage record;
  };
  struct Engine {
    Engine(const char* l, bool rx) : label(l), is_rx(rx) {}
    const char* label;
    bool is_rx;
    EngineState state = EngineState::IDLE_RECV;
    std::uint64_t in_flight = 0;
    std::deque<Job> pending;
    std::optional<Job> current;
    kern::SimTime busy_since;
    kern::SimTime drain_at;
    Wait wait = Wait::None;
    ChannelId wait_channel = ChannelId::App;
    bool fault_reported = false;
    std::optional<Publish> publish;
    EngineStats* stats = nullptr;
  };
  struct Channel {
    Channel(ChannelId i, CommandType f) : id(i), flag(f) {}
    ChannelId id;
    CommandType flag;
    std::optional<kern::ActorId> parked;
    std::deque<std::uint64_t> status;
    bool rejecting = false;
    std::uint64_t resync = 0;
    std::deque<std::uint64_t> bufs;
    std::deque<std::uint64_t> lens;
    std::deque<ReadyEntry> ready;
    std::uint32_t batch_max = 1;
    std::deque<ReadyEntry>* delivered = nullptr;
  };

  void on_store(const Command& cmd);
  void on_load(std::uint64_t paddr, kern::ActorId requester);
  void try_pair(Channel& ch, Engine& eng);
  void service(Channel& ch);
  void raise_status(Channel& ch, wire::ErrorStatus status, std::uint64_t value);
  Channel& channel(ChannelId id) { return id == ChannelId::Net ? net_ : app_; }
  Channel& channel_for_buffer(std::uint64_t vaddr);

  void transition(Engine& e, Trigger t);
  void maybe_start(Engine& e);
  void begin(Engine& e);
  bool run_rx(Engine& e);
  bool run_tx(Engine& e);
  bool emit_error(Engine& e, std::uint8_t method_id, std::uint32_t seq_id, wire::ErrorStatus status,
                  std::uint64_t cycles_so_far);
  /// Timed access that turns a page fault into a stalled engine.
  std::optional<mem::AccessResult> engine_access(Engine& e, std::uint64_t vaddr, std::size_t size,
                                                 mem::AccessKind kind);
  std::uint64_t mem_cycles(const mem::AccessResult& r) const;
  void finish_busy(Engine& e, std::uint64_t cycles, const mem::AccessResult& stores);
  void on_work_done(Engine& e);
  void on_drained(Engine& e);
  void on_cleanup(Engine& e);

  mem::MemorySystem& mem_;
  const wire::ServiceSchema& schema_;
  AccelConfig cfg_;
  HostShared& shared_;
  kern::Kernel* kernel_ = nullptr;
  kern::ActorId self_ = 0;
  AccelStats stats_;
  TransitionLog transitions_;
  Engine rx_{"rx", true};
  Engine tx_{"tx", false};
  Channel net_{ChannelId::Net, CommandType::DPDK_NET_FLAG};
  Channel app_{ChannelId::App, CommandType::APP_READY_FLAG};
};

}  // namespace arcsim::accel
