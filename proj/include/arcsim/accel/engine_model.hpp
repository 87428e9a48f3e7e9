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

#include "arcsim/wirecodec/codec.hpp"

#include <cmath>
#include <cstdint>
#include <deque>
#include <unordered_map>

namespace arcsim::accel {

/// Per-stage engine cost model in accelerator cycles. Memory latency is
/// added on top by the engine for the loads each stage performs.
struct EngineCostModel {
  std::uint32_t header_parse_fixed = 8;
  double header_parse_per_byte = 0.125;
  std::uint32_t dispatch = 4;
  std::uint32_t deser_fixed = 0;
  double deser_per_byte = 2.0;
  std::uint32_t deser_per_field = 0;
  std::uint32_t header_create = 8;
  std::uint32_t ser_fixed = 0;
  double ser_per_byte = 1.5;
  std::uint32_t ser_per_field = 0;
  /// Cycles to issue one line of an outgoing store.
  std::uint32_t store_issue_per_line = 1;
  /// DONE-state bookkeeping before the engine looks for more work.
  std::uint32_t cleanup = 1;

  std::uint64_t header_parse_cycles(std::size_t header_bytes) const {
    return header_parse_fixed + per_byte(header_parse_per_byte, header_bytes);
  }
  std::uint64_t deser_cycles(std::size_t body_bytes, std::size_t fields) const {
    return deser_fixed + per_byte(deser_per_byte, body_bytes) + std::uint64_t{deser_per_field} * fields;
  }
  std::uint64_t ser_cycles(std::size_t body_bytes, std::size_t fields) const {
    return ser_fixed + per_byte(ser_per_byte, body_bytes) + std::uint64_t{ser_per_field} * fields;
  }
  void validate() const;

 private:
  static std::uint64_t per_byte(double rate, std::size_t bytes) {
    return static_cast<std::uint64_t>(std::ceil(rate * static_cast<double>(bytes) - 1e-9));
  }
};

/// Bytes of the flattened in-memory record an engine writes to AppRecv (or
/// the application writes to AppResp): a 16 B header, then an 8 B slot per
/// field plus out-of-line data for strings and lists.
std::size_t record_bytes(const wire::RpcMessage& msg);

/// Outcome of the receive path (header parse, dispatch, deserialize) shared
/// by the RxEngine and the software baseline so both reject the same frames
/// with the same error.
struct RecvOutcome {
  bool ok = false;
  wire::RpcMessage request;
  std::uint8_t method_id = 0;
  std::uint32_t seq_id = 0;
  wire::ErrorStatus status = wire::ErrorStatus::Ok;
  /// How far the pipeline got: 0 header failed, 1 dispatch failed,
  /// 2 deserialize failed or succeeded.
  int stages_run = 0;
};
RecvOutcome recv_decode(std::span<const std::uint8_t> frame, const wire::ServiceSchema& schema);

/// respFunction check: a response record of a known method carrying every
/// response field of the schema.
bool response_complete(const wire::RpcMessage& msg, const wire::ServiceSchema& schema);

struct ReadyEntry {
  std::uint64_t vaddr = 0;
  std::size_t bytes = 0;
};

/// Contents of the shared buffers. Timing is modeled on addresses through
/// the memory system; the bytes and records themselves live here.
struct HostShared {
  std::unordered_map<std::uint64_t, wire::Frame> frames;
  std::unordered_map<std::uint64_t, wire::RpcMessage> records;
  /// Entries handed to a core by a completion token, oldest first.
  std::deque<ReadyEntry> app_delivered;
  std::deque<ReadyEntry> net_delivered;
  /// Completion counters the host can poll: descriptors retired by each
  /// engine, in acceptance order.
  std::uint64_t rx_consumed = 0;
  std::uint64_t tx_consumed = 0;
};

}  // namespace arcsim::accel
