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

#include "arcsim/wirecodec/schema.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace arcsim::wire {

using ScalarValue = std::variant<bool, std::int8_t, std::int16_t, std::int32_t, std::int64_t, std::string>;

struct ListValue {
  WireType elem_type = WireType::I64;
  std::vector<ScalarValue> items;
  friend bool operator==(const ListValue&, const ListValue&) = default;
};

using FieldValue =
    std::variant<bool, std::int8_t, std::int16_t, std::int32_t, std::int64_t, std::string, ListValue>;

struct Field {
  std::uint16_t id = 0;
  WireType type = WireType::Bool;
  FieldValue value;
  friend bool operator==(const Field&, const Field&) = default;
};

enum class Direction : std::uint8_t { Request = 0, Response = 1, Error = 2 };

struct RpcMessage {
  std::uint32_t seq_id = 0;
  std::uint8_t method_id = 0;
  Direction direction = Direction::Request;
  std::vector<Field> fields;

  const Field* find(std::uint16_t id) const;
  friend bool operator==(const RpcMessage&, const RpcMessage&) = default;
};

using Frame = std::vector<std::uint8_t>;

inline constexpr std::uint8_t kWireVersion = 0x01;
inline constexpr std::uint8_t kStop = 0x00;
/// len(4) + version + direction + method_id + seq_id(4)
inline constexpr std::size_t kHeaderBytes = 11;
inline constexpr std::size_t kDefaultMaxPayload = 64 * 1024;

enum class CodecErrc {
  SchemaViolation,
  PayloadTooLarge,
  TruncatedFrame,
  UnknownMethod,
  MalformedField,
  BadVersion,
};

std::string_view to_string(CodecErrc e);

class CodecError : public std::runtime_error {
 public:
  CodecError(CodecErrc code, const std::string& what);
  CodecErrc code() const { return code_; }

 private:
  CodecErrc code_;
};

/// Status codes carried by error frames and by opcode-0 status words.
enum class ErrorStatus : std::int32_t {
  Ok = 0,
  UnknownMethod = 1,
  MalformedFrame = 2,
  SchemaViolation = 3,
  QueueOverflow = 4,
  PageFault = 5,
  UnknownOpcode = 6,
};

struct Header {
  std::uint8_t method_id = 0;
  std::uint32_t seq_id = 0;
  Direction direction = Direction::Request;
  std::size_t body_offset = kHeaderBytes;
};

struct Decoded {
  RpcMessage message;
  std::size_t consumed = 0;
};

/// Checks `msg` against `schema`; throws CodecError(SchemaViolation or
/// PayloadTooLarge). Error-direction messages are checked for well-typed
/// fields only.
void validate(const RpcMessage& msg, const ServiceSchema& schema,
              std::size_t max_payload = kDefaultMaxPayload);

Frame serialize(const RpcMessage& msg, const ServiceSchema& schema,
                std::size_t max_payload = kDefaultMaxPayload);
Decoded deserialize(std::span<const std::uint8_t> frame, const ServiceSchema& schema,
                    std::size_t max_payload = kDefaultMaxPayload);
Header parse_header(std::span<const std::uint8_t> frame);

/// Encoded size of the body (fields plus STOP) without building the frame.
std::size_t body_size(const RpcMessage& msg);
/// Field count for cost purposes: top-level fields plus list elements.
std::size_t field_units(const RpcMessage& msg);

RpcMessage make_error_message(std::uint8_t method_id, std::uint32_t seq_id, ErrorStatus status);

struct StageCosts {
  std::size_t header_bytes = kHeaderBytes;
  std::size_t dispatch_lookups = 1;
  std::size_t deser_bytes = 0;
  std::size_t ser_bytes = 0;
  std::size_t resp_header_bytes = kHeaderBytes;
  std::size_t deser_fields = 0;
  std::size_t ser_fields = 0;
};

/// Byte and field counts that drive the per-stage timing models.
StageCosts stage_costs(const RpcMessage& request, const RpcMessage& response);
StageCosts request_stage_costs(const RpcMessage& request);

}  // namespace arcsim::wire
