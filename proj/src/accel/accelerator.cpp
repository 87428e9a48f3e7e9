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

#include "arcsim/accel/accelerator.hpp"

#include <algorithm>
#include <array>

namespace arcsim::accel {

using kern::SimTime;
using wire::ErrorStatus;

void AccelConfig::validate() const {
  cost.validate();
  if (pending_depth == 0) throw std::invalid_argument("accel.pending_depth must be >= 1");
  if (app_batch_max == 0 || net_batch_max == 0) throw std::invalid_argument("accel batch limits must be >= 1");
  if (watch.length < 16) throw std::invalid_argument("accel watch range must span at least 16 bytes");
}

Accelerator::Accelerator(mem::MemorySystem& mem, const wire::ServiceSchema& schema, const AccelConfig& cfg,
                         HostShared& shared)
    : mem_(mem), schema_(schema), cfg_(cfg), shared_(shared) {
  cfg_.validate();
  rx_.stats = &stats_.rx;
  tx_.stats = &stats_.tx;
  net_.batch_max = cfg_.net_batch_max;
  net_.delivered = &shared_.net_delivered;
  app_.batch_max = cfg_.app_batch_max;
  app_.delivered = &shared_.app_delivered;
}

void Accelerator::bind(kern::Kernel& kernel, kern::ActorId self) {
  kernel_ = &kernel;
  self_ = self;
}

std::string_view Accelerator::kind_name(std::uint32_t kind) const {
  static constexpr std::array<std::string_view, 9> names = {
      "?", "uc_store", "uc_load", "rx_work_done", "rx_drained", "rx_cleanup", "tx_work_done", "tx_drained",
      "tx_cleanup"};
  return kind < names.size() ? names[kind] : "?";
}

void Accelerator::handle(kern::Kernel&, const kern::SimEvent& ev) {
  switch (ev.kind) {
    case kUcStore:
      if (auto cmd = snoop(cfg_.watch, UcAccess{true, true, ev.arg1, ev.arg0}, stats_.snoop)) on_store(*cmd);
      break;
    case kUcLoad: on_load(ev.arg0, static_cast<kern::ActorId>(ev.arg1)); break;
    case kRxWorkDone: on_work_done(rx_); break;
    case kRxDrained: on_drained(rx_); break;
    case kRxCleanup: on_cleanup(rx_); break;
    case kTxWorkDone: on_work_done(tx_); break;
    case kTxDrained: on_drained(tx_); break;
    case kTxCleanup: on_cleanup(tx_); break;
    default: throw kern::SimulationError("accelerator: unknown event kind");
  }
}

bool Accelerator::idle() const {
  auto engine_idle = [](const Engine& e) {
    return e.state == EngineState::IDLE_RECV && e.pending.empty() && !e.current;
  };
  auto channel_idle = [](const Channel& c) {
    return c.bufs.empty() && c.lens.empty() && c.status.empty() && c.ready.empty();
  };
  return engine_idle(rx_) && engine_idle(tx_) && channel_idle(net_) && channel_idle(app_);
}

std::size_t Accelerator::in_flight_rpcs() const {
  return rx_.pending.size() + (rx_.current ? 1 : 0) + tx_.pending.size() + (tx_.current ? 1 : 0) +
         app_.ready.size() + net_.ready.size();
}

void Accelerator::notify_space() {
  for (Engine* e : {&rx_, &tx_}) {
    if (e->wait == Wait::Space) {
      e->wait = Wait::None;
      begin(*e);
    }
  }
}

// Command interface -----------------------------------------------------------

void Accelerator::on_store(const Command& cmd) {
  switch (cmd.type()) {
    case CommandType::SEND_NET_BUF:
      net_.bufs.push_back(cmd.payload());
      try_pair(net_, rx_);
      break;
    case CommandType::SEND_NET_LEN:
      net_.lens.push_back(cmd.payload());
      try_pair(net_, rx_);
      break;
    case CommandType::SEND_APP_BUF:
      app_.bufs.push_back(cmd.payload());
      try_pair(app_, tx_);
      break;
    case CommandType::SEND_APP_RESP:
      app_.lens.push_back(cmd.payload());
      try_pair(app_, tx_);
      break;
    case CommandType::APP_READY_FLAG:
    case CommandType::DPDK_NET_FLAG:
      // Flags are loads; a store to a flag slot carries no meaning.
      ++stats_.rejected_commands;
      break;
  }
}

void Accelerator::on_load(std::uint64_t paddr, kern::ActorId requester) {
  const auto uc = mem_.latency().uc_interconnect_ns;
  const auto cmd = snoop(cfg_.watch, UcAccess{true, false, paddr, 0}, stats_.snoop);
  Channel* ch = nullptr;
  if (cmd && cmd->type() == CommandType::APP_READY_FLAG) ch = &app_;
  if (cmd && cmd->type() == CommandType::DPDK_NET_FLAG) ch = &net_;
  if (ch == nullptr) {
    ++stats_.status_words;
    kernel_->schedule_in(SimTime::from_ns(uc), requester, kUcLoadResponse,
                         encode_status(StatusWord{ErrorStatus::UnknownOpcode, paddr & 0xF}));
    return;
  }
  if (ch->parked) throw kern::SimulationError("accelerator: second load parked on one flag");
  ch->parked = requester;
  // A load issued after the host saw a fault report means the page is now
  // populated: stalled engines retry.
  for (Engine* e : {&rx_, &tx_}) {
    if (e->wait == Wait::Fault && e->wait_channel == ch->id && e->fault_reported) {
      e->wait = Wait::None;
      e->fault_reported = false;
      begin(*e);
    }
  }
  service(*ch);
}

void Accelerator::try_pair(Channel& ch, Engine& eng) {
  while (!ch.bufs.empty() && !ch.lens.empty()) {
    const Job job{ch.bufs.front(), ch.lens.front()};
    ch.bufs.pop_front();
    ch.lens.pop_front();
    if (ch.rejecting) {
      // After an overflow everything is refused until the host resends the
      // rejected descriptor, which keeps requests in their original order.
      if (job.vaddr != ch.resync) {
        ++stats_.rejected_commands;
        continue;
      }
      ch.rejecting = false;
    }
    if (eng.pending.size() >= cfg_.pending_depth) {
      ++stats_.rejected_commands;
      ++stats_.overflow_events;
      ch.rejecting = true;
      ch.resync = job.vaddr;
      raise_status(ch, ErrorStatus::QueueOverflow, job.vaddr);
      continue;
    }
    eng.pending.push_back(job);
    maybe_start(eng);
  }
}

void Accelerator::service(Channel& ch) {
  if (!ch.parked) return;
  std::uint64_t word = 0;
  if (!ch.status.empty()) {
    word = ch.status.front();
    ch.status.pop_front();
    ++stats_.status_words;
    if (decode_status(word)->status == ErrorStatus::PageFault) {
      for (Engine* e : {&rx_, &tx_}) {
        if (e->wait == Wait::Fault && e->wait_channel == ch.id) e->fault_reported = true;
      }
    }
  } else if (!ch.ready.empty()) {
    const std::size_t k = std::min<std::size_t>(ch.ready.size(), ch.batch_max);
    for (std::size_t i = 0; i < k; ++i) {
      ch.delivered->push_back(ch.ready.front());
      ch.ready.pop_front();
    }
    word = encode_command(k, ch.flag).raw;
    ++stats_.tokens;
  } else {
    return;
  }
  const kern::ActorId to = *ch.parked;
  ch.parked.reset();
  kernel_->schedule_in(SimTime::from_ns(mem_.latency().uc_interconnect_ns), to, kUcLoadResponse, word);
}

void Accelerator::raise_status(Channel& ch, ErrorStatus status, std::uint64_t value) {
  ch.status.push_back(encode_status(StatusWord{status, value}));
  service(ch);
}

Accelerator::Channel& Accelerator::channel_for_buffer(std::uint64_t vaddr) {
  if (mem_.buffer(mem::BufferId::AppRecv).contains(vaddr) || mem_.buffer(mem::BufferId::AppResp).contains(vaddr)) {
    return app_;
  }
  return net_;
}

// Engines ---------------------------------------------------------------------

void Accelerator::transition(Engine& e, Trigger t) {
  const EngineState from = e.state;
  const EngineState to = step_fsm(from, t, e.in_flight);
  transitions_.record(from, to);
  e.state = to;
  const SimTime now = kernel_->now();
  if (to == EngineState::BUSY) {
    e.busy_since = now;
    const Engine& other = e.is_rx ? tx_ : rx_;
    if (other.state == EngineState::BUSY) ++stats_.simultaneous_busy;
  } else if (to == EngineState::IDLE_RECV || to == EngineState::IDLE_RESP) {
    e.stats->busy_ps += (now - e.busy_since).ps;
  }
}

void Accelerator::maybe_start(Engine& e) {
  if (e.state != EngineState::IDLE_RECV || e.pending.empty()) return;
  e.current = e.pending.front();
  e.pending.pop_front();
  transition(e, Trigger::valid_request);
  begin(e);
}

void Accelerator::begin(Engine& e) {
  e.publish.reset();
  if (e.is_rx) {
    run_rx(e);
  } else {
    run_tx(e);
  }
}

std::uint64_t Accelerator::mem_cycles(const mem::AccessResult& r) const {
  return mem_.accel_clock().time_to_cycles_ceil(r.total);
}

std::optional<mem::AccessResult> Accelerator::engine_access(Engine& e, std::uint64_t vaddr, std::size_t size,
                                                            mem::AccessKind kind) {
  try {
    return mem_.access(mem::kAccelAgent, vaddr, size, kind);
  } catch (const mem::PageFault& f) {
    ++stats_.page_faults;
    ++e.stats->fault_stalls;
    Channel& ch = channel_for_buffer(f.vaddr());
    e.wait = Wait::Fault;
    e.wait_channel = ch.id;
    e.fault_reported = false;
    raise_status(ch, ErrorStatus::PageFault, f.vaddr() >> 12);
    return std::nullopt;
  }
}

bool Accelerator::run_rx(Engine& e) {
  const Job job = *e.current;
  const auto fit = shared_.frames.find(job.vaddr);
  if (fit == shared_.frames.end()) throw kern::SimulationError("RxEngine: descriptor names an empty NetRecv slot");
  const wire::Frame& frame = fit->second;
  const std::size_t len = static_cast<std::size_t>(std::min<std::uint64_t>(job.len, frame.size()));
  const std::span<const std::uint8_t> bytes(frame.data(), len);

  // Header parse: the line holding the fixed header.
  const std::size_t hdr_bytes = std::min(len, wire::kHeaderBytes);
  const auto hdr = engine_access(e, job.vaddr, std::max<std::size_t>(hdr_bytes, 1), mem::AccessKind::Load);
  if (!hdr) return false;
  const std::uint64_t hp = cfg_.cost.header_parse_cycles(hdr_bytes) + mem_cycles(*hdr);
  wire::Header h;
  try {
    h = wire::parse_header(bytes);
  } catch (const wire::CodecError&) {
    return emit_error(e, 0, 0, ErrorStatus::MalformedFrame, hp);
  }

  // Dispatch to recvFunctionN.
  const std::uint64_t disp = cfg_.cost.dispatch;
  if (h.direction != wire::Direction::Request) {
    return emit_error(e, h.method_id, h.seq_id, ErrorStatus::MalformedFrame, hp + disp);
  }
  if (schema_.find_method(h.method_id) == nullptr) {
    return emit_error(e, h.method_id, h.seq_id, ErrorStatus::UnknownMethod, hp + disp);
  }

  // Deserialize: the remaining lines of the frame, then the record store.
  const std::uint64_t first_line_end = (job.vaddr / mem::kLineBytes + 1) * mem::kLineBytes;
  mem::AccessResult body;
  if (job.vaddr + len > first_line_end) {
    const auto b = engine_access(e, first_line_end, job.vaddr + len - first_line_end, mem::AccessKind::Load);
    if (!b) return false;
    body = *b;
  }
  wire::Decoded dec;
  try {
    dec = wire::deserialize(bytes, schema_);
  } catch (const wire::CodecError& ex) {
    const auto status =
        ex.code() == wire::CodecErrc::UnknownMethod ? ErrorStatus::UnknownMethod : ErrorStatus::MalformedFrame;
    return emit_error(e, h.method_id, h.seq_id, status, hp + disp + mem_cycles(body));
  }
  std::uint64_t deser = cfg_.cost.deser_cycles(len - wire::kHeaderBytes, wire::field_units(dec.message)) +
                        mem_cycles(body);
  const std::size_t rb = record_bytes(dec.message);
  auto& app_recv = mem_.buffer(mem::BufferId::AppRecv);
  const auto slot = app_recv.allocate(rb);
  if (!slot) {
    e.wait = Wait::Space;
    ++e.stats->space_stalls;
    return false;
  }
  const auto st = engine_access(e, *slot, rb, mem::AccessKind::Store);
  if (!st) {
    app_recv.release(*slot);
    return false;
  }
  deser += std::uint64_t{cfg_.cost.store_issue_per_line} * st->lines;

  e.stats->header_parse += hp;
  e.stats->dispatch += disp;
  e.stats->deserialize += deser;
  Publish p;
  p.channel = ChannelId::App;
  p.vaddr = *slot;
  p.bytes = rb;
  p.record = std::move(dec.message);
  e.publish = std::move(p);
  finish_busy(e, hp + disp + deser, *st);
  return true;
}

bool Accelerator::run_tx(Engine& e) {
  const Job job = *e.current;
  const auto rec = engine_access(e, job.vaddr, std::max<std::uint64_t>(job.len, 1), mem::AccessKind::Load);
  if (!rec) return false;
  const auto it = shared_.records.find(job.vaddr);
  if (it == shared_.records.end()) throw kern::SimulationError("TxEngine: descriptor names an empty AppResp slot");
  const wire::RpcMessage& msg = it->second;
  const std::uint64_t hc = cfg_.cost.header_create;

  // respFunctionN: the record must be a complete response of a known method.
  bool ok = response_complete(msg, schema_);
  wire::Frame frame;
  if (ok) {
    try {
      frame = wire::serialize(msg, schema_);
    } catch (const wire::CodecError&) {
      ok = false;
    }
  }
  if (!ok) return emit_error(e, msg.method_id, msg.seq_id, ErrorStatus::SchemaViolation, hc + mem_cycles(*rec));

  std::uint64_t ser = cfg_.cost.ser_cycles(frame.size() - wire::kHeaderBytes, wire::field_units(msg)) +
                      mem_cycles(*rec);
  auto& net_resp = mem_.buffer(mem::BufferId::NetResp);
  const auto slot = net_resp.allocate(frame.size());
  if (!slot) {
    e.wait = Wait::Space;
    ++e.stats->space_stalls;
    return false;
  }
  const auto st = engine_access(e, *slot, frame.size(), mem::AccessKind::Store);
  if (!st) {
    net_resp.release(*slot);
    return false;
  }
  ser += std::uint64_t{cfg_.cost.store_issue_per_line} * st->lines;

  e.stats->header_create += hc;
  e.stats->serialize += ser;
  Publish p;
  p.channel = ChannelId::Net;
  p.vaddr = *slot;
  p.bytes = frame.size();
  p.is_frame = true;
  p.frame = std::move(frame);
  e.publish = std::move(p);
  finish_busy(e, hc + ser, *st);
  return true;
}

bool Accelerator::emit_error(Engine& e, std::uint8_t method_id, std::uint32_t seq_id, ErrorStatus status,
                             std::uint64_t cycles_so_far) {
  wire::Frame frame = wire::serialize(wire::make_error_message(method_id, seq_id, status), schema_);
  std::uint64_t cycles = cycles_so_far + cfg_.cost.header_create +
                         cfg_.cost.ser_cycles(frame.size() - wire::kHeaderBytes, 1);
  auto& net_resp = mem_.buffer(mem::BufferId::NetResp);
  const auto slot = net_resp.allocate(frame.size());
  if (!slot) {
    e.wait = Wait::Space;
    ++e.stats->space_stalls;
    return false;
  }
  const auto st = engine_access(e, *slot, frame.size(), mem::AccessKind::Store);
  if (!st) {
    net_resp.release(*slot);
    return false;
  }
  cycles += std::uint64_t{cfg_.cost.store_issue_per_line} * st->lines;
  e.stats->error_path += cycles;
  ++e.stats->errors;
  Publish p;
  p.channel = ChannelId::Net;
  p.vaddr = *slot;
  p.bytes = frame.size();
  p.is_frame = true;
  p.frame = std::move(frame);
  e.publish = std::move(p);
  finish_busy(e, cycles, *st);
  return true;
}

void Accelerator::finish_busy(Engine& e, std::uint64_t cycles, const mem::AccessResult& stores) {
  const SimTime done = kernel_->now() + mem_.accel_clock().cycles_to_time(cycles);
  e.in_flight = stores.lines;
  e.drain_at = done + stores.total;
  kernel_->schedule(done, self_, e.is_rx ? kRxWorkDone : kTxWorkDone);
}

void Accelerator::on_work_done(Engine& e) {
  transition(e, Trigger::work_done);
  if (e.state == EngineState::DRAIN) {
    ++e.stats->drains;
    kernel_->schedule(std::max(e.drain_at, kernel_->now()), self_, e.is_rx ? kRxDrained : kTxDrained);
  } else {
    on_drained(e);
  }
}

void Accelerator::on_drained(Engine& e) {
  if (e.state == EngineState::DRAIN) {
    e.in_flight = 0;
    transition(e, Trigger::mem_drained);
  }
  // DONE: results become visible only now that every store has landed.
  Publish& p = *e.publish;
  if (p.is_frame) {
    shared_.frames[p.vaddr] = std::move(p.frame);
  } else {
    shared_.records[p.vaddr] = std::move(p.record);
  }
  Channel& out = channel(p.channel);
  out.ready.push_back(ReadyEntry{p.vaddr, p.bytes});
  const Job job = *e.current;
  if (e.is_rx) {
    shared_.frames.erase(job.vaddr);
    mem_.buffer(mem::BufferId::NetRecv).release(job.vaddr);
    ++shared_.rx_consumed;
  } else {
    shared_.records.erase(job.vaddr);
    mem_.buffer(mem::BufferId::AppResp).release(job.vaddr);
    ++shared_.tx_consumed;
  }
  ++e.stats->rpcs;
  e.current.reset();
  e.publish.reset();
  service(out);
  kernel_->schedule_in(mem_.accel_clock().cycles_to_time(cfg_.cost.cleanup), self_,
                       e.is_rx ? kRxCleanup : kTxCleanup);
}

void Accelerator::on_cleanup(Engine& e) {
  if (e.pending.empty()) {
    transition(e, Trigger::no_work);
    return;
  }
  transition(e, Trigger::more_work);
  e.current = e.pending.front();
  e.pending.pop_front();
  transition(e, Trigger::valid_request);
  begin(e);
}

}  // namespace arcsim::accel
