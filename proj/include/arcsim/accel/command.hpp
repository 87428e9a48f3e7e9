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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>

namespace arcsim::accel {

/// Opcodes in the low four bits of a command word. 0 is reserved for
/// status words returned on a parked load and is never a valid command.
enum class CommandType : std::uint8_t {
  SEND_NET_BUF = 1,
  SEND_NET_LEN = 2,
  APP_READY_FLAG = 3,
  SEND_APP_RESP = 4,
  SEND_APP_BUF = 5,
  DPDK_NET_FLAG = 6,
};
inline constexpr std::uint8_t kStatusOpcode = 0;
inline constexpr std::uint64_t kMaxPayload = (std::uint64_t{1} << 60) - 1;

std::string_view to_string(CommandType t);
bool is_valid_opcode(std::uint8_t op);

enum class CommandErrc { PayloadOverflow, UnknownOpcode };

class CommandError : public std::runtime_error {
 public:
  CommandError(CommandErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  CommandErrc code() const { return code_; }

 private:
  CommandErrc code_;
};

struct Command {
  std::uint64_t raw = 0;

  std::uint64_t payload() const { return raw >> 4; }
  std::uint8_t opcode() const { return static_cast<std::uint8_t>(raw & 0xF); }
  CommandType type() const { return static_cast<CommandType>(opcode()); }
  friend bool operator==(const Command&, const Command&) = default;
};

Command encode_command(std::uint64_t payload, CommandType op);
/// Throws CommandError(UnknownOpcode) for opcode 0 and 7..15.
Command decode_command(std::uint64_t raw);

/// Status word: opcode 0, payload = (value << 8) | status code. `value`
/// is the faulting virtual page for page faults and the rejected buffer
/// address for queue overflows.
struct StatusWord {
  wire::ErrorStatus status = wire::ErrorStatus::Ok;
  std::uint64_t value = 0;
};
std::uint64_t encode_status(const StatusWord& s);
std::optional<StatusWord> decode_status(std::uint64_t raw);

/// Physical window monitored by the snooping command interface.
struct WatchRange {
  std::uint64_t base = 0xFE00'0000ULL;
  std::uint64_t length = 4096;
  bool pinned = true;

  bool contains(std::uint64_t paddr) const { return paddr >= base && paddr - base < length; }
};

struct UcAccess {
  bool uncached = true;
  bool is_store = true;
  std::uint64_t paddr = 0;
  /// Store data; unused for loads, whose opcode travels in the address.
  std::uint64_t data = 0;
};

struct SnoopStats {
  std::uint64_t commands = 0;
  std::uint64_t ignored = 0;
  std::uint64_t unknown_opcode = 0;
};

/// Decodes a command from an intercepted access. Stores carry the whole
/// command word; loads carry the opcode in the low four address bits.
/// Returns nullopt for accesses that are cacheable, outside the range or
/// carry an invalid opcode (the latter counted as errors).
std::optional<Command> snoop(const WatchRange& range, const UcAccess& access, SnoopStats& stats);

}  // namespace arcsim::accel
