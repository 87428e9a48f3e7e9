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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace arcsim::wire {

enum class WireType : std::uint8_t {
  Bool = 1,
  I8 = 2,
  I16 = 3,
  I32 = 4,
  I64 = 5,
  Bytes = 6,
  String = 7,
  List = 8,
};

std::string_view to_string(WireType t);
std::optional<WireType> wire_type_from_string(std::string_view s);
std::optional<WireType> wire_type_from_byte(std::uint8_t b);
bool is_length_prefixed(WireType t);

struct FieldSchema {
  std::uint16_t id = 0;
  WireType type = WireType::Bool;
  /// Element type for LIST fields; lists of lists are not supported.
  WireType elem_type = WireType::Bool;
  std::string name;
};

struct MethodSchema {
  std::uint8_t id = 0;
  std::string name;
  std::vector<FieldSchema> request;
  std::vector<FieldSchema> response;

  const FieldSchema* find_request_field(std::uint16_t fid) const;
  const FieldSchema* find_response_field(std::uint16_t fid) const;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ServiceSchema {
  std::string service_name;
  std::vector<MethodSchema> methods;

  const MethodSchema* find_method(std::uint8_t id) const;
  const MethodSchema* find_method(std::string_view name) const;
  /// Throws SchemaError on duplicate ids or empty names.
  void validate() const;
};

/// Parses the declarative schema text format:
///
///   service <name>
///   method <id> <Name>
///     request <field_id> <name> <TYPE>
///     response <field_id> <name> <TYPE>
///
/// TYPE is BOOL, I8, I16, I32, I64, BYTES, STRING or LIST<elem>. Blank
/// lines and `#` comments are ignored.
ServiceSchema parse_schema(std::string_view text);
std::string format_schema(const ServiceSchema& schema);

/// Text of a shipped schema (`memcached`, `post_storage`, `unique_id`).
std::string_view builtin_schema_text(std::string_view service);
const ServiceSchema& builtin_schema(std::string_view service);
std::vector<std::string> builtin_schema_names();

}  // namespace arcsim::wire
