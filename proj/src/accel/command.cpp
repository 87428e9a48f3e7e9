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

#include "arcsim/accel/command.hpp"

#include <sstream>

namespace arcsim::accel {

std::string_view to_string(CommandType t) {
  switch (t) {
    case CommandType::SEND_NET_BUF: return "SEND_NET_BUF";
    case CommandType::SEND_NET_LEN: return "SEND_NET_LEN";
    case CommandType::APP_READY_FLAG: return "APP_READY_FLAG";
    case CommandType::SEND_APP_RESP: return "SEND_APP_RESP";
    case CommandType::SEND_APP_BUF: return "SEND_APP_BUF";
    case CommandType::DPDK_NET_FLAG: return "DPDK_NET_FLAG";
  }
  return "?";
}

bool is_valid_opcode(std::uint8_t op) { return op >= 1 && op <= 6; }

Command encode_command(std::uint64_t payload, CommandType op) {
  if (payload > kMaxPayload) {
    std::ostringstream msg;
    msg << "command payload 0x" << std::hex << payload << " exceeds 60 bits";
    throw CommandError(CommandErrc::PayloadOverflow, msg.str());
  }
  if (!is_valid_opcode(static_cast<std::uint8_t>(op))) {
    throw CommandError(CommandErrc::UnknownOpcode, "invalid opcode");
  }
  return Command{(payload << 4) | static_cast<std::uint64_t>(op)};
}

Command decode_command(std::uint64_t raw) {
  const auto op = static_cast<std::uint8_t>(raw & 0xF);
  if (!is_valid_opcode(op)) {
    throw CommandError(CommandErrc::UnknownOpcode, "unknown opcode " + std::to_string(op));
  }
  return Command{raw};
}

std::uint64_t encode_status(const StatusWord& s) {
  const std::uint64_t payload = (s.value << 8) | (static_cast<std::uint64_t>(s.status) & 0xFF);
  if ((s.value >> 52) != 0) throw CommandError(CommandErrc::PayloadOverflow, "status value exceeds 52 bits");
  return (payload << 4) | kStatusOpcode;
}

std::optional<StatusWord> decode_status(std::uint64_t raw) {
  if ((raw & 0xF) != kStatusOpcode) return std::nullopt;
  const std::uint64_t payload = raw >> 4;
  return StatusWord{static_cast<wire::ErrorStatus>(payload & 0xFF), payload >> 8};
}

std::optional<Command> snoop(const WatchRange& range, const UcAccess& access, SnoopStats& stats) {
  if (!access.uncached || !range.contains(access.paddr)) {
    ++stats.ignored;
    return std::nullopt;
  }
  const std::uint64_t raw = access.is_store ? access.data : (access.paddr & 0xF);
  if (!is_valid_opcode(static_cast<std::uint8_t>(raw & 0xF))) {
    ++stats.unknown_opcode;
    return std::nullopt;
  }
  ++stats.commands;
  return Command{raw};
}

}  // namespace arcsim::accel
