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
#include "arcsim/cores/actors.hpp"

#include <algorithm>
#include <array>

namespace arcsim::cores {

using accel::CommandType;
using wire::ErrorStatus;

namespace {

template <std::size_t N>
std::string_view pick(const std::array<std::string_view, N>& names, std::uint32_t kind) {
  return kind < names.size() ? names[kind] : "?";
}

}  // namespace

// NIC ---------------------------------------------------------------------------

Nic::Nic(mem::MemorySystem& mem, accel::HostShared& shared, std::vector<wire::Frame> requests,
         std::vector<SimTime> schedule, bool closed_loop)
    : mem_(mem),
      shared_(shared),
      requests_(std::move(requests)),
      schedule_(std::move(schedule)),
      closed_loop_(closed_loop),
      ingress_(requests_.size()) {
  latencies_.reserve(requests_.size());
}

void Nic::bind(kern::Kernel& kernel, kern::ActorId self) {
  kernel_ = &kernel;
  self_ = self;
}

std::string_view Nic::kind_name(std::uint32_t kind) const {
  static constexpr std::array<std::string_view, 4> names = {"?", "arrive", "delivered", "transmit"};
  return pick(names, kind);
}

void Nic::start() {
  if (requests_.empty()) return;
  if (closed_loop_) {
    const std::size_t w = std::min(schedule_.size(), requests_.size());
    for (; next_ < w; ++next_) kernel_->schedule(SimTime{}, self_, kArrive, next_);
  } else {
    kernel_->schedule(schedule_.at(0), self_, kArrive, 0);
    next_ = 1;
  }
}

void Nic::handle(kern::Kernel&, const kern::SimEvent& ev) {
  switch (ev.kind) {
    case kArrive:
      arrive(static_cast<std::uint32_t>(ev.arg0));
      if (!closed_loop_ && next_ < requests_.size()) {
        kernel_->schedule(schedule_.at(next_), self_, kArrive, next_);
        ++next_;
      }
      break;
    case kDelivered:
      ring_.push_back(RxPacket{static_cast<std::uint32_t>(ev.arg0), ev.arg1, shared_.frames.at(ev.arg1).size()});
      for (const kern::ActorId l : listeners_) kernel_->schedule_in(SimTime{}, l, kNicWake);
      break;
    case kTransmit: transmit(ev.arg0); break;
    default: throw kern::SimulationError("nic: unknown event kind");
  }
}

void Nic::issue_next() {
  if (closed_loop_ && next_ < requests_.size()) {
    kernel_->schedule_in(SimTime{}, self_, kArrive, next_);
    ++next_;
  }
}

void Nic::arrive(std::uint32_t index) {
  ingress_[index] = kernel_->now();
  ++stats_.injected;
  wire::Frame& frame = requests_[index];
  const mem::DcaResult r = mem_.dca_inject(frame.size());
  if (r.dropped) {
    ++stats_.drops;
    issue_next();
    return;
  }
  shared_.frames[r.vaddr] = std::move(frame);
  kernel_->schedule_in(r.latency, self_, kDelivered, index, r.vaddr);
}

void Nic::transmit(std::uint64_t vaddr) {
  const auto it = shared_.frames.find(vaddr);
  if (it == shared_.frames.end()) throw kern::SimulationError("nic: transmit of an empty NetResp slot");
  wire::Frame frame = std::move(it->second);
  shared_.frames.erase(it);
  mem_.buffer(mem::BufferId::NetResp).release(vaddr);
  const wire::Header h = wire::parse_header(frame);
  if (h.direction == wire::Direction::Error) {
    ++stats_.errors;
  } else {
    ++stats_.completed;
  }
  const SimTime now = kernel_->now();
  if (h.seq_id >= 1 && h.seq_id <= requests_.size()) {
    latencies_.push_back((now - ingress_[h.seq_id - 1]).ps);
  } else {
    ++stats_.unmatched;
  }
  stats_.last_egress = now;
  if (capture_) responses_.emplace_back(h.seq_id, std::move(frame));
  if (on_space_) on_space_();
  issue_next();
}

// Core plumbing -------------------------------------------------------------------

CoreActor::CoreActor(std::string name, mem::AgentId agent, mem::MemorySystem& mem)
    : name_(std::move(name)), agent_(agent), mem_(mem) {
  stats_.role = name_;
}

void CoreActor::bind(kern::Kernel& kernel, kern::ActorId self) {
  kernel_ = &kernel;
  self_ = self;
}

std::uint64_t CoreActor::ns_cycles(std::uint64_t ns) const {
  return mem_.cpu_clock().time_to_cycles_ceil(SimTime::from_ns(ns));
}

std::uint64_t CoreActor::access(std::uint64_t vaddr, std::size_t size, mem::AccessKind kind) {
  return mem_.cpu_clock().time_to_cycles_ceil(mem_.access(agent_, vaddr, size, kind).total);
}

SimTime CoreActor::cycles_time(std::uint64_t cycles) const { return mem_.cpu_clock().cycles_to_time(cycles); }

void CoreActor::busy_for(std::uint64_t cycles, std::uint32_t kind, std::uint64_t arg0) {
  kernel_->schedule_in(cycles_time(cycles), self_, kind, arg0);
}

// NetCore ------------------------------------------------------------------------

NetCore::NetCore(mem::AgentId agent, mem::MemorySystem& mem, accel::HostShared& shared, Nic& nic,
                 const accel::Accelerator& acc, const HostConfig& host)
    : CoreActor("netcore", agent, mem), shared_(shared), nic_(nic), acc_(acc), host_(host) {}

std::string_view NetCore::kind_name(std::uint32_t kind) const {
  if (kind == kWake) return "wake";
  if (kind == kLoadReturn) return "load_return";
  return kind == kStepDone ? "step_done" : "?";
}

bool NetCore::idle() const { return state_ == State::Asleep && resend_.empty() && outstanding_ == 0; }

void NetCore::handle(kern::Kernel&, const kern::SimEvent& ev) {
  switch (ev.kind) {
    case kWake:
      if (state_ == State::Asleep) step();
      break;
    case kStepDone:
      state_ = State::Asleep;
      step();
      break;
    case kLoadReturn:
      stats_.stall_cycles += mem_.cpu_clock().time_to_cycles_ceil(kernel_->now() - parked_at_);
      state_ = State::Asleep;
      on_word(ev.arg0);
      break;
    default: throw kern::SimulationError("netcore: unknown event kind");
  }
}

SimTime NetCore::post_store(SimTime at, std::uint64_t payload, CommandType op) {
  ++stats_.uc_stores;
  const SimTime arrive = at + SimTime::from_ns(mem_.latency().uc_interconnect_ns);
  kernel_->schedule(arrive, acc_.id(), accel::Accelerator::kUcStore, accel::encode_command(payload, op).raw,
                    acc_.watch_base());
  return arrive;
}

void NetCore::prune() {
  while (pruned_ < shared_.rx_consumed && !sent_.empty()) {
    sent_.pop_front();
    ++pruned_;
  }
}

void NetCore::step() {
  prune();
  auto& ring = nic_.ring();
  if (resend_.empty() && ring.empty()) {
    if (outstanding_ > 0) {
      park();
    } else {
      state_ = State::Asleep;
    }
    return;
  }
  std::uint64_t cycles = 0;
  const SimTime now = kernel_->now();
  const std::uint64_t store_cost = ns_cycles(host_.uc_store_issue_ns);
  for (std::uint32_t n = 0; n < host_.net_burst && (!resend_.empty() || !ring.empty()); ++n) {
    Desc d{};
    if (!resend_.empty()) {
      d = resend_.front();
      resend_.pop_front();
      ++stats_.resends;
    } else {
      const RxPacket p = ring.front();
      ring.pop_front();
      d = Desc{p.vaddr, p.bytes};
      sent_.push_back(d);
      ++outstanding_;
      ++stats_.packets;
      stats_.instructions += ceil_u64(host_.io_instr_per_packet);
      const std::uint64_t c = ns_cycles(host_.poll_ns);
      add(stats_.io, c);
      cycles += c;
    }
    add(stats_.io, store_cost);
    cycles += store_cost;
    post_store(now + cycles_time(cycles), d.vaddr, CommandType::SEND_NET_BUF);
    add(stats_.io, store_cost);
    cycles += store_cost;
    post_store(now + cycles_time(cycles), d.bytes, CommandType::SEND_NET_LEN);
  }
  state_ = State::Busy;
  busy_for(cycles, kStepDone);
}

void NetCore::park() {
  state_ = State::Parked;
  parked_at_ = kernel_->now();
  ++stats_.uc_loads;
  kernel_->schedule_in(SimTime::from_ns(mem_.latency().uc_interconnect_ns), acc_.id(), accel::Accelerator::kUcLoad,
                       acc_.watch_base() | static_cast<std::uint64_t>(CommandType::DPDK_NET_FLAG), self_);
}

void NetCore::on_word(std::uint64_t word) {
  if (const auto status = accel::decode_status(word)) {
    ++stats_.status_words;
    if (status->status == ErrorStatus::PageFault) {
      ++stats_.page_faults;
      mem_.host_touch(status->value << 12);
      const std::uint64_t c = ns_cycles(mem_.config().os_page_fault_ns);
      add(stats_.io, c);
      state_ = State::Busy;
      busy_for(c, kStepDone);
      return;
    }
    if (status->status == ErrorStatus::QueueOverflow) {
      prune();
      const auto it = std::find_if(sent_.begin(), sent_.end(), [&](const Desc& d) { return d.vaddr == status->value; });
      if (it == sent_.end()) throw kern::SimulationError("netcore: overflow names an unknown descriptor");
      resend_.assign(it, sent_.end());
      step();
      return;
    }
    throw kern::SimulationError("netcore: unexpected status word");
  }
  const accel::Command cmd = accel::decode_command(word);
  if (cmd.type() != CommandType::DPDK_NET_FLAG) throw kern::SimulationError("netcore: token on the wrong flag");
  ++stats_.tokens;
  const std::uint64_t k = cmd.payload();
  const SimTime now = kernel_->now();
  const std::uint64_t c = ns_cycles(host_.transmit_ns);
  std::uint64_t cycles = 0;
  for (std::uint64_t i = 0; i < k; ++i) {
    if (shared_.net_delivered.empty()) throw kern::SimulationError("netcore: token larger than the delivered list");
    const accel::ReadyEntry e = shared_.net_delivered.front();
    shared_.net_delivered.pop_front();
    add(stats_.io, c);
    cycles += c;
    kernel_->schedule(now + cycles_time(cycles), nic_.id(), Nic::kTransmit, e.vaddr);
    --outstanding_;
  }
  state_ = State::Busy;
  busy_for(cycles, kStepDone);
}

// AppCore ------------------------------------------------------------------------

AppCore::AppCore(mem::AgentId agent, mem::MemorySystem& mem, accel::HostShared& shared, accel::Accelerator& acc,
                 ServiceLogic& logic, const HostConfig& host)
    : CoreActor("appcore", agent, mem), shared_(shared), acc_(acc), logic_(logic), host_(host) {}

std::string_view AppCore::kind_name(std::uint32_t kind) const {
  static constexpr std::array<std::string_view, 5> names = {"?", "start", "record_done", "fault_done", "retry"};
  if (kind == kLoadReturn) return "load_return";
  return pick(names, kind);
}

void AppCore::handle(kern::Kernel&, const kern::SimEvent& ev) {
  switch (ev.kind) {
    case kStart: park(); break;
    case kLoadReturn:
      stats_.stall_cycles += mem_.cpu_clock().time_to_cycles_ceil(kernel_->now() - parked_at_);
      state_ = State::Idle;
      on_word(ev.arg0);
      break;
    case kRecordDone:
    case kRetry:
      state_ = State::Idle;
      next_record();
      break;
    case kFaultDone:
      state_ = State::Idle;
      park();
      break;
    default: throw kern::SimulationError("appcore: unknown event kind");
  }
}

void AppCore::park() {
  state_ = State::Parked;
  parked_at_ = kernel_->now();
  ++stats_.uc_loads;
  kernel_->schedule_in(SimTime::from_ns(mem_.latency().uc_interconnect_ns), acc_.id(), accel::Accelerator::kUcLoad,
                       acc_.watch_base() | static_cast<std::uint64_t>(CommandType::APP_READY_FLAG), self_);
}

void AppCore::prune() {
  while (pruned_ < shared_.tx_consumed && !sent_.empty()) {
    sent_.pop_front();
    ++pruned_;
  }
}

void AppCore::send(const Desc& d, SimTime at) {
  const SimTime uc = SimTime::from_ns(mem_.latency().uc_interconnect_ns);
  const SimTime issue = cycles_time(ns_cycles(host_.uc_store_issue_ns));
  stats_.uc_stores += 2;
  kernel_->schedule(at - issue + uc, acc_.id(), accel::Accelerator::kUcStore,
                    accel::encode_command(d.vaddr, CommandType::SEND_APP_BUF).raw, acc_.watch_base());
  kernel_->schedule(at + uc, acc_.id(), accel::Accelerator::kUcStore,
                    accel::encode_command(d.bytes, CommandType::SEND_APP_RESP).raw, acc_.watch_base());
}

void AppCore::on_word(std::uint64_t word) {
  if (const auto status = accel::decode_status(word)) {
    ++stats_.status_words;
    if (status->status == ErrorStatus::PageFault) {
      ++stats_.page_faults;
      mem_.host_touch(status->value << 12);
      const std::uint64_t c = ns_cycles(mem_.config().os_page_fault_ns);
      add(stats_.io, c);
      state_ = State::Busy;
      busy_for(c, kFaultDone);
      return;
    }
    if (status->status == ErrorStatus::QueueOverflow) {
      prune();
      const auto it = std::find_if(sent_.begin(), sent_.end(), [&](const Desc& d) { return d.vaddr == status->value; });
      if (it == sent_.end()) throw kern::SimulationError("appcore: overflow names an unknown descriptor");
      resend_.assign(it, sent_.end());
      next_record();
      return;
    }
    throw kern::SimulationError("appcore: unexpected status word");
  }
  const accel::Command cmd = accel::decode_command(word);
  if (cmd.type() != CommandType::APP_READY_FLAG) throw kern::SimulationError("appcore: token on the wrong flag");
  ++stats_.tokens;
  todo_ = static_cast<std::size_t>(cmd.payload());
  next_record();
}

void AppCore::next_record() {
  prune();
  const SimTime now = kernel_->now();
  const std::uint64_t store_cost = ns_cycles(host_.uc_store_issue_ns);
  if (!resend_.empty()) {
    std::uint64_t cycles = 0;
    while (!resend_.empty()) {
      add(stats_.io, 2 * store_cost);
      cycles += 2 * store_cost;
      send(resend_.front(), now + cycles_time(cycles));
      resend_.pop_front();
      ++stats_.resends;
    }
    state_ = State::Busy;
    busy_for(cycles, kRecordDone);
    return;
  }
  if (stash_) {
    finish_record();
    return;
  }
  if (todo_ == 0) {
    park();
    return;
  }
  if (shared_.app_delivered.empty()) throw kern::SimulationError("appcore: token larger than the delivered list");
  const accel::ReadyEntry e = shared_.app_delivered.front();
  shared_.app_delivered.pop_front();
  --todo_;
  ++stats_.records;

  // Read the request record, run the logic, write the response record.
  auto rit = shared_.records.find(e.vaddr);
  if (rit == shared_.records.end()) throw kern::SimulationError("appcore: delivered record missing");
  Stash st;
  st.io = access(e.vaddr, std::max<std::size_t>(e.bytes, 1), mem::AccessKind::Load) +
          ceil_u64(host_.app_record_instr * host_.app_cpi);
  stats_.instructions += ceil_u64(host_.app_record_instr);
  const wire::RpcMessage request = std::move(rit->second);
  shared_.records.erase(rit);
  mem_.buffer(mem::BufferId::AppRecv).release(e.vaddr);
  acc_.notify_space();

  LogicResult res = logic_.execute(request);
  st.logic = res.compute.cycles;
  for (const MemRef& r : res.refs) st.logic += access(r.vaddr, r.size, r.kind);
  stats_.instructions += res.compute.instructions;
  st.response = std::move(res.response);
  stash_ = std::move(st);
  finish_record();
}

void AppCore::finish_record() {
  const std::size_t rb = accel::record_bytes(stash_->response);
  const auto slot = mem_.buffer(mem::BufferId::AppResp).allocate(rb);
  if (!slot) {
    // Wait for the TxEngine to drain AppResp.
    ++stats_.space_retries;
    state_ = State::Busy;
    kernel_->schedule_in(SimTime::from_ns(host_.space_retry_ns), self_, kRetry);
    return;
  }
  const std::uint64_t io = stash_->io + access(*slot, rb, mem::AccessKind::Store) +
                           2 * ns_cycles(host_.uc_store_issue_ns);
  const std::uint64_t logic = stash_->logic;
  shared_.records[*slot] = std::move(stash_->response);
  stash_.reset();
  add(stats_.io, io);
  add(stats_.logic, logic);
  const std::uint64_t cycles = io + logic;
  const Desc d{*slot, rb};
  sent_.push_back(d);
  send(d, kernel_->now() + cycles_time(cycles));
  state_ = State::Busy;
  busy_for(cycles, kRecordDone);
}

// Baseline -----------------------------------------------------------------------

BaselineCore::BaselineCore(std::string name, mem::AgentId agent, mem::MemorySystem& mem, accel::HostShared& shared,
                           Nic& nic, const wire::ServiceSchema& schema, ServiceLogic& logic,
                           const CpuRpcCostModel& cpu, const HostConfig& host)
    : CoreActor(std::move(name), agent, mem),
      shared_(shared),
      nic_(nic),
      schema_(schema),
      logic_(logic),
      cpu_(cpu),
      host_(host) {}

std::string_view BaselineCore::kind_name(std::uint32_t kind) const {
  if (kind == kWake) return "wake";
  static constexpr std::array<std::string_view, 3> names = {"?", "done", "retry"};
  return pick(names, kind);
}

void BaselineCore::handle(kern::Kernel&, const kern::SimEvent& ev) {
  switch (ev.kind) {
    case kWake: run(); break;
    case kRetry: finish_output(); break;
    case kDone: {
      kernel_->schedule_in(SimTime{}, nic_.id(), Nic::kTransmit, out_vaddr_);
      const RxPacket p = pending_->packet;
      shared_.frames.erase(p.vaddr);
      mem_.buffer(mem::BufferId::NetRecv).release(p.vaddr);
      pending_.reset();
      busy_ = false;
      run();
      break;
    }
    default: throw kern::SimulationError("baseline: unknown event kind");
  }
}

void BaselineCore::run() {
  if (busy_) return;
  auto& ring = nic_.ring();
  if (ring.empty()) return;
  busy_ = true;
  const std::uint64_t start = stats_.busy_cycles;
  const RxPacket p = ring.front();
  ring.pop_front();
  ++stats_.packets;
  const wire::Frame& frame = shared_.frames.at(p.vaddr);
  const std::size_t len = frame.size();

  stats_.instructions += ceil_u64(host_.io_instr_per_packet);
  add(stats_.io, ns_cycles(host_.poll_ns));

  // Receive path in software.
  const std::size_t hdr = std::min(len, wire::kHeaderBytes);
  StageWork w = cpu_.header_parse.eval(hdr, 0);
  stats_.instructions += w.instructions;
  add(stats_.header_parse, w.cycles + access(p.vaddr, std::max<std::size_t>(hdr, 1), mem::AccessKind::Load));
  accel::RecvOutcome in = accel::recv_decode(frame, schema_);
  stats_.codec_calls += in.stages_run >= 2 ? 2 : 1;
  stats_.codec_bytes += len;
  if (in.stages_run >= 1) {
    w = cpu_.dispatch.eval(0, 0);
    stats_.instructions += w.instructions;
    add(stats_.dispatch, w.cycles);
  }
  if (in.stages_run >= 2) {
    const std::uint64_t first_end = (p.vaddr / mem::kLineBytes + 1) * mem::kLineBytes;
    std::uint64_t m = 0;
    if (p.vaddr + len > first_end) m = access(first_end, p.vaddr + len - first_end, mem::AccessKind::Load);
    w = cpu_.deserialize.eval(len - wire::kHeaderBytes, in.ok ? wire::field_units(in.request) : 0);
    stats_.instructions += w.instructions;
    add(stats_.deserialize, w.cycles + m);
  }

  wire::RpcMessage out;
  if (in.ok) {
    LogicResult res = logic_.execute(in.request);
    std::uint64_t logic = res.compute.cycles;
    for (const MemRef& r : res.refs) logic += access(r.vaddr, r.size, r.kind);
    stats_.instructions += res.compute.instructions;
    add(stats_.logic, logic);
    out = accel::response_complete(res.response, schema_)
              ? std::move(res.response)
              : wire::make_error_message(in.request.method_id, in.request.seq_id, ErrorStatus::SchemaViolation);
  } else {
    out = wire::make_error_message(in.method_id, in.seq_id, in.status);
  }

  // Response path in software.
  w = cpu_.header_create.eval(wire::kHeaderBytes, 0);
  stats_.instructions += w.instructions;
  add(stats_.header_create, w.cycles);
  Pending pend;
  pend.packet = p;
  pend.response = wire::serialize(out, schema_);
  pend.resp_fields = wire::field_units(out);
  pend.is_error = out.direction == wire::Direction::Error;
  ++stats_.codec_calls;
  stats_.codec_bytes += pend.response.size();
  w = cpu_.serialize.eval(pend.response.size() - wire::kHeaderBytes, pend.resp_fields);
  stats_.instructions += w.instructions;
  add(stats_.serialize, w.cycles);
  pending_ = std::move(pend);
  chunk_cycles_ = stats_.busy_cycles - start;
  finish_output();
}

void BaselineCore::finish_output() {
  const wire::Frame& f = pending_->response;
  const auto slot = mem_.buffer(mem::BufferId::NetResp).allocate(f.size());
  if (!slot) {
    ++stats_.space_retries;
    kernel_->schedule_in(SimTime::from_ns(host_.space_retry_ns), self_, kRetry);
    return;
  }
  const std::uint64_t st = access(*slot, f.size(), mem::AccessKind::Store);
  add(stats_.serialize, st);
  const std::uint64_t tx = ns_cycles(host_.transmit_ns);
  add(stats_.io, tx);
  shared_.frames[*slot] = std::move(pending_->response);
  out_vaddr_ = *slot;
  const std::uint64_t cycles = chunk_cycles_ + st + tx;
  chunk_cycles_ = 0;
  busy_for(cycles, kDone);
}

}  // namespace arcsim::cores
