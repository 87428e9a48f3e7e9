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

#include "arcsim/wirecodec/schema.hpp"

#include "arcsim_embedded.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace arcsim::wire {

std::string_view to_string(WireType t) {
  switch (t) {
    case WireType::Bool: return "BOOL";
    case WireType::I8: return "I8";
    case WireType::I16: return "I16";
    case WireType::I32: return "I32";
    case WireType::I64: return "I64";
    case WireType::Bytes: return "BYTES";
    case WireType::String: return "STRING";
    case WireType::List: return "LIST";
  }
  return "?";
}

std::optional<WireType> wire_type_from_string(std::string_view s) {
  for (std::uint8_t b = 1; b <= 8; ++b) {
    const auto t = static_cast<WireType>(b);
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::optional<WireType> wire_type_from_byte(std::uint8_t b) {
  if (b < 1 || b > 8) return std::nullopt;
  return static_cast<WireType>(b);
}

bool is_length_prefixed(WireType t) { return t == WireType::Bytes || t == WireType::String; }

namespace {

const FieldSchema* find_field(const std::vector<FieldSchema>& fields, std::uint16_t fid) {
  for (const auto& f : fields) {
    if (f.id == fid) return &f;
  }
  return nullptr;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
T parse_int(std::string_view s, int line_no) {
  T v{};
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || p != end) {
    throw SchemaError("line " + std::to_string(line_no) + ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

void check_fields(const std::vector<FieldSchema>& fields, const std::string& where) {
  std::set<std::uint16_t> ids;
  for (const auto& f : fields) {
    if (f.name.empty()) throw SchemaError(where + ": field with empty name");
    if (!ids.insert(f.id).second) throw SchemaError(where + ": duplicate field id " + std::to_string(f.id));
    if (f.type == WireType::List && f.elem_type == WireType::List) {
      throw SchemaError(where + ": nested lists are not supported");
    }
  }
}

}  // namespace

const FieldSchema* MethodSchema::find_request_field(std::uint16_t fid) const { return find_field(request, fid); }
const FieldSchema* MethodSchema::find_response_field(std::uint16_t fid) const { return find_field(response, fid); }

const MethodSchema* ServiceSchema::find_method(std::uint8_t id) const {
  for (const auto& m : methods) {
    if (m.id == id) return &m;
  }
  return nullptr;
}

const MethodSchema* ServiceSchema::find_method(std::string_view name) const {
  for (const auto& m : methods) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

void ServiceSchema::validate() const {
  if (service_name.empty()) throw SchemaError("service name is empty");
  std::set<std::uint8_t> ids;
  for (const auto& m : methods) {
    if (m.name.empty()) throw SchemaError(service_name + ": method with empty name");
    if (!ids.insert(m.id).second) throw SchemaError(service_name + ": duplicate method id " + std::to_string(m.id));
    check_fields(m.request, service_name + "." + m.name + " request");
    check_fields(m.response, service_name + "." + m.name + " response");
  }
}

ServiceSchema parse_schema(std::string_view text) {
  ServiceSchema schema;
  MethodSchema* current = nullptr;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    const auto where = "line " + std::to_string(line_no);
    if (tok[0] == "service") {
      if (tok.size() != 2) throw SchemaError(where + ": expected 'service <name>'");
      if (!schema.service_name.empty()) throw SchemaError(where + ": one service per schema file");
      schema.service_name = std::string(tok[1]);
    } else if (tok[0] == "method") {
      if (tok.size() != 3) throw SchemaError(where + ": expected 'method <id> <name>'");
      const auto id = parse_int<unsigned>(tok[1], line_no);
      if (id > 0xFF) throw SchemaError(where + ": method id out of range");
      schema.methods.push_back(MethodSchema{static_cast<std::uint8_t>(id), std::string(tok[2]), {}, {}});
      current = &schema.methods.back();
    } else if (tok[0] == "request" || tok[0] == "response") {
      if (current == nullptr) throw SchemaError(where + ": field outside of a method");
      if (tok.size() != 4) throw SchemaError(where + ": expected '<request|response> <id> <name> <TYPE>'");
      const auto id = parse_int<unsigned>(tok[1], line_no);
      if (id > 0xFFFF) throw SchemaError(where + ": field id out of range");
      FieldSchema f;
      f.id = static_cast<std::uint16_t>(id);
      f.name = std::string(tok[2]);
      std::string_view type = tok[3];
      if (type.starts_with("LIST<") && type.ends_with(">")) {
        const auto elem = wire_type_from_string(type.substr(5, type.size() - 6));
        if (!elem) throw SchemaError(where + ": unknown list element type");
        f.type = WireType::List;
        f.elem_type = *elem;
      } else {
        const auto t = wire_type_from_string(type);
        if (!t || *t == WireType::List) throw SchemaError(where + ": unknown type '" + std::string(type) + "'");
        f.type = *t;
      }
      (tok[0] == "request" ? current->request : current->response).push_back(std::move(f));
    } else {
      throw SchemaError(where + ": unknown directive '" + std::string(tok[0]) + "'");
    }
  }
  schema.validate();
  return schema;
}

std::string format_schema(const ServiceSchema& schema) {
  std::ostringstream out;
  out << "service " << schema.service_name << '\n';
  auto field = [&](const char* dir, const FieldSchema& f) {
    out << "  " << dir << ' ' << f.id << ' ' << f.name << ' ';
    if (f.type == WireType::List) {
      out << "LIST<" << to_string(f.elem_type) << ">";
    } else {
      out << to_string(f.type);
    }
    out << '\n';
  };
  for (const auto& m : schema.methods) {
    out << "\nmethod " << static_cast<unsigned>(m.id) << ' ' << m.name << '\n';
    for (const auto& f : m.request) field("request", f);
    for (const auto& f : m.response) field("response", f);
  }
  return out.str();
}

std::string_view builtin_schema_text(std::string_view service) {
  if (service == "memcached") return embedded::kMemcachedSchema;
  if (service == "post_storage") return embedded::kPostStorageSchema;
  if (service == "unique_id") return embedded::kUniqueIdSchema;
  throw SchemaError("no builtin schema for service '" + std::string(service) + "'");
}

const ServiceSchema& builtin_schema(std::string_view service) {
  static const std::map<std::string, ServiceSchema, std::less<>> cache = [] {
    std::map<std::string, ServiceSchema, std::less<>> m;
    for (const char* name : {"memcached", "post_storage", "unique_id"}) {
      m.emplace(name, parse_schema(builtin_schema_text(name)));
    }
    return m;
  }();
  const auto it = cache.find(service);
  if (it == cache.end()) throw SchemaError("no builtin schema for service '" + std::string(service) + "'");
  return it->second;
}

std::vector<std::string> builtin_schema_names() { return {"memcached", "post_storage", "unique_id"}; }

}  // namespace arcsim::wire
