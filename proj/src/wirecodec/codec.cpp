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

#include "arcsim/wirecodec/codec.hpp"

#include <set>

namespace arcsim::wire {

std::string_view to_string(CodecErrc e) {
  switch (e) {
    case CodecErrc::SchemaViolation: return "SchemaViolation";
    case CodecErrc::PayloadTooLarge: return "PayloadTooLarge";
    case CodecErrc::TruncatedFrame: return "TruncatedFrame";
    case CodecErrc::UnknownMethod: return "UnknownMethod";
    case CodecErrc::MalformedField: return "MalformedField";
    case CodecErrc::BadVersion: return "BadVersion";
  }
  return "?";
}

CodecError::CodecError(CodecErrc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

const Field* RpcMessage::find(std::uint16_t id) const {
  for (const auto& f : fields) {
    if (f.id == id) return &f;
  }
  return nullptr;
}

namespace {

/// Index of the FieldValue/ScalarValue alternative that carries `t`.
std::size_t alternative_for(WireType t) {
  switch (t) {
    case WireType::Bool: return 0;
    case WireType::I8: return 1;
    case WireType::I16: return 2;
    case WireType::I32: return 3;
    case WireType::I64: return 4;
    case WireType::Bytes:
    case WireType::String: return 5;
    case WireType::List: return 6;
  }
  return 7;
}

std::size_t fixed_width(WireType t) {
  switch (t) {
    case WireType::Bool:
    case WireType::I8: return 1;
    case WireType::I16: return 2;
    case WireType::I32: return 4;
    case WireType::I64: return 8;
    default: return 0;
  }
}

std::size_t scalar_size(WireType t, const ScalarValue& v) {
  if (is_length_prefixed(t)) return 4 + std::get<std::string>(v).size();
  return fixed_width(t);
}

void check_scalar(WireType t, const ScalarValue& v, std::size_t max_payload, const std::string& where) {
  if (v.index() != alternative_for(t)) {
    throw CodecError(CodecErrc::SchemaViolation, where + ": value does not match wire type " + std::string(to_string(t)));
  }
  if (is_length_prefixed(t) && std::get<std::string>(v).size() > max_payload) {
    throw CodecError(CodecErrc::PayloadTooLarge, where + ": " + std::to_string(std::get<std::string>(v).size()) +
                                                     " bytes exceeds " + std::to_string(max_payload));
  }
}

ScalarValue as_scalar(const FieldValue& v) {
  return std::visit(
      [](const auto& x) -> ScalarValue {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, ListValue>) {
          return ScalarValue{};
        } else {
          return ScalarValue{x};
        }
      },
      v);
}

void check_field_value(const Field& f, std::size_t max_payload, const std::string& where) {
  if (f.value.index() != alternative_for(f.type)) {
    throw CodecError(CodecErrc::SchemaViolation,
                     where + ": value does not match wire type " + std::string(to_string(f.type)));
  }
  if (f.type == WireType::List) {
    const auto& list = std::get<ListValue>(f.value);
    if (list.elem_type == WireType::List) throw CodecError(CodecErrc::SchemaViolation, where + ": nested list");
    for (const auto& item : list.items) check_scalar(list.elem_type, item, max_payload, where);
  } else {
    check_scalar(f.type, as_scalar(f.value), max_payload, where);
  }
}

class Writer {
 public:
  explicit Writer(Frame& out) : out_(out) {}
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v));
  }
  void u32(std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void u64(std::uint64_t v) {
    for (int s = 56; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void bytes(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }

 private:
  Frame& out_;
};

void write_scalar(Writer& w, WireType t, const ScalarValue& v) {
  switch (t) {
    case WireType::Bool: w.u8(std::get<bool>(v) ? 1 : 0); break;
    case WireType::I8: w.u8(static_cast<std::uint8_t>(std::get<std::int8_t>(v))); break;
    case WireType::I16: w.u16(static_cast<std::uint16_t>(std::get<std::int16_t>(v))); break;
    case WireType::I32: w.u32(static_cast<std::uint32_t>(std::get<std::int32_t>(v))); break;
    case WireType::I64: w.u64(static_cast<std::uint64_t>(std::get<std::int64_t>(v))); break;
    case WireType::Bytes:
    case WireType::String: w.bytes(std::get<std::string>(v)); break;
    case WireType::List: break;
  }
}

class Reader {
 public:
  /// `limit` is the end of the declared frame; reads beyond it are malformed.
  Reader(std::span<const std::uint8_t> buf, std::size_t pos, std::size_t limit) : buf_(buf), pos_(pos), limit_(limit) {}

  std::size_t pos() const { return pos_; }
  void need(std::size_t n) const {
    if (pos_ + n > limit_) throw CodecError(CodecErrc::MalformedField, "field runs past the declared frame length");
  }
  std::uint8_t u8() {
    need(1);
    return buf_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    const auto v = static_cast<std::uint16_t>((buf_[pos_] << 8) | buf_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | buf_[pos_ + i];
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | buf_[pos_ + i];
    pos_ += 8;
    return v;
  }
  std::string bytes(std::size_t max_payload) {
    const std::uint32_t n = u32();
    if (n > max_payload) throw CodecError(CodecErrc::MalformedField, "length prefix exceeds max payload");
    need(n);
    std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> buf_;
  std::size_t pos_;
  std::size_t limit_;
};

ScalarValue read_scalar(Reader& r, WireType t, std::size_t max_payload) {
  switch (t) {
    case WireType::Bool: {
      const auto b = r.u8();
      if (b > 1) throw CodecError(CodecErrc::MalformedField, "bool byte is not 0 or 1");
      return b == 1;
    }
    case WireType::I8: return static_cast<std::int8_t>(r.u8());
    case WireType::I16: return static_cast<std::int16_t>(r.u16());
    case WireType::I32: return static_cast<std::int32_t>(r.u32());
    case WireType::I64: return static_cast<std::int64_t>(r.u64());
    case WireType::Bytes:
    case WireType::String: return r.bytes(max_payload);
    case WireType::List: break;
  }
  throw CodecError(CodecErrc::MalformedField, "list element cannot be a list");
}

FieldValue to_field_value(ScalarValue v) {
  return std::visit([](auto&& x) -> FieldValue { return FieldValue{std::move(x)}; }, std::move(v));
}

const std::vector<FieldSchema>* schema_fields(const MethodSchema* m, Direction d) {
  if (m == nullptr) return nullptr;
  return d == Direction::Request ? &m->request : &m->response;
}

}  // namespace

void validate(const RpcMessage& msg, const ServiceSchema& schema, std::size_t max_payload) {
  if (static_cast<std::uint8_t>(msg.direction) > 2) throw CodecError(CodecErrc::SchemaViolation, "bad direction");
  const MethodSchema* method = nullptr;
  if (msg.direction != Direction::Error) {
    method = schema.find_method(msg.method_id);
    if (method == nullptr) {
      throw CodecError(CodecErrc::SchemaViolation,
                       "method " + std::to_string(msg.method_id) + " not in service " + schema.service_name);
    }
  }
  const auto* fields = schema_fields(method, msg.direction);
  std::set<std::uint16_t> seen;
  for (const auto& f : msg.fields) {
    const std::string where = "field " + std::to_string(f.id);
    if (!seen.insert(f.id).second) throw CodecError(CodecErrc::SchemaViolation, where + ": duplicate");
    if (fields != nullptr) {
      const FieldSchema* fs = nullptr;
      for (const auto& cand : *fields) {
        if (cand.id == f.id) fs = &cand;
      }
      if (fs == nullptr) throw CodecError(CodecErrc::SchemaViolation, where + ": not in schema");
      if (fs->type != f.type) throw CodecError(CodecErrc::SchemaViolation, where + ": wire type differs from schema");
      if (f.type == WireType::List && f.value.index() == alternative_for(WireType::List) &&
          std::get<ListValue>(f.value).elem_type != fs->elem_type) {
        throw CodecError(CodecErrc::SchemaViolation, where + ": list element type differs from schema");
      }
    }
    check_field_value(f, max_payload, where);
  }
}

Frame serialize(const RpcMessage& msg, const ServiceSchema& schema, std::size_t max_payload) {
  validate(msg, schema, max_payload);
  Frame out;
  const std::size_t len = kHeaderBytes - 4 + body_size(msg);
  out.reserve(len + 4);
  Writer w(out);
  w.u32(static_cast<std::uint32_t>(len));
  w.u8(kWireVersion);
  w.u8(static_cast<std::uint8_t>(msg.direction));
  w.u8(msg.method_id);
  w.u32(msg.seq_id);
  for (const auto& f : msg.fields) {
    w.u8(static_cast<std::uint8_t>(f.type));
    w.u16(f.id);
    if (f.type == WireType::List) {
      const auto& list = std::get<ListValue>(f.value);
      w.u8(static_cast<std::uint8_t>(list.elem_type));
      w.u32(static_cast<std::uint32_t>(list.items.size()));
      for (const auto& item : list.items) write_scalar(w, list.elem_type, item);
    } else {
      write_scalar(w, f.type, as_scalar(f.value));
    }
  }
  w.u8(kStop);
  return out;
}

Header parse_header(std::span<const std::uint8_t> frame) {
  if (frame.size() < kHeaderBytes) {
    throw CodecError(CodecErrc::TruncatedFrame,
                     "frame has " + std::to_string(frame.size()) + " bytes, header needs " + std::to_string(kHeaderBytes));
  }
  if (frame[4] != kWireVersion) throw CodecError(CodecErrc::BadVersion, "version byte " + std::to_string(frame[4]));
  if (frame[5] > 2) throw CodecError(CodecErrc::MalformedField, "direction byte " + std::to_string(frame[5]));
  Header h;
  h.direction = static_cast<Direction>(frame[5]);
  h.method_id = frame[6];
  h.seq_id = (std::uint32_t{frame[7]} << 24) | (std::uint32_t{frame[8]} << 16) | (std::uint32_t{frame[9]} << 8) |
             std::uint32_t{frame[10]};
  h.body_offset = kHeaderBytes;
  return h;
}

Decoded deserialize(std::span<const std::uint8_t> frame, const ServiceSchema& schema, std::size_t max_payload) {
  if (frame.size() < 4) throw CodecError(CodecErrc::TruncatedFrame, "missing length word");
  const std::size_t len = (std::size_t{frame[0]} << 24) | (std::size_t{frame[1]} << 16) |
                          (std::size_t{frame[2]} << 8) | std::size_t{frame[3]};
  if (frame.size() < len + 4) {
    throw CodecError(CodecErrc::TruncatedFrame,
                     "declared " + std::to_string(len + 4) + " bytes, have " + std::to_string(frame.size()));
  }
  if (len < kHeaderBytes - 4 + 1) throw CodecError(CodecErrc::MalformedField, "declared length shorter than header");
  const Header h = parse_header(frame);
  const MethodSchema* method = nullptr;
  if (h.direction != Direction::Error) {
    method = schema.find_method(h.method_id);
    if (method == nullptr) {
      throw CodecError(CodecErrc::UnknownMethod,
                       "method id " + std::to_string(h.method_id) + " not in service " + schema.service_name);
    }
  }
  const auto* fields = schema_fields(method, h.direction);
  Decoded out;
  out.message.seq_id = h.seq_id;
  out.message.method_id = h.method_id;
  out.message.direction = h.direction;
  const std::size_t end = len + 4;
  Reader r(frame, h.body_offset, end);
  std::set<std::uint16_t> seen;
  for (;;) {
    const std::uint8_t tb = r.u8();
    if (tb == kStop) break;
    const auto type = wire_type_from_byte(tb);
    if (!type) throw CodecError(CodecErrc::MalformedField, "unknown wire type byte " + std::to_string(tb));
    Field f;
    f.type = *type;
    f.id = r.u16();
    if (!seen.insert(f.id).second) throw CodecError(CodecErrc::MalformedField, "duplicate field " + std::to_string(f.id));
    if (fields != nullptr) {
      const FieldSchema* fs = nullptr;
      for (const auto& cand : *fields) {
        if (cand.id == f.id) fs = &cand;
      }
      if (fs == nullptr || fs->type != f.type) {
        throw CodecError(CodecErrc::MalformedField, "field " + std::to_string(f.id) + " does not match schema");
      }
    }
    if (f.type == WireType::List) {
      ListValue list;
      const auto elem = wire_type_from_byte(r.u8());
      if (!elem || *elem == WireType::List) throw CodecError(CodecErrc::MalformedField, "bad list element type");
      list.elem_type = *elem;
      if (fields != nullptr) {
        for (const auto& cand : *fields) {
          if (cand.id == f.id && cand.elem_type != list.elem_type) {
            throw CodecError(CodecErrc::MalformedField, "list element type does not match schema");
          }
        }
      }
      const std::uint32_t count = r.u32();
      // Every element takes at least one byte, so the count is bounded by the frame.
      if (count > end - r.pos()) throw CodecError(CodecErrc::MalformedField, "list count exceeds frame");
      list.items.reserve(count);
      for (std::uint32_t i = 0; i < count; ++i) list.items.push_back(read_scalar(r, list.elem_type, max_payload));
      f.value = std::move(list);
    } else {
      f.value = to_field_value(read_scalar(r, f.type, max_payload));
    }
    out.message.fields.push_back(std::move(f));
  }
  if (r.pos() != end) throw CodecError(CodecErrc::MalformedField, "bytes after STOP inside the declared frame");
  out.consumed = end;
  return out;
}

std::size_t body_size(const RpcMessage& msg) {
  std::size_t n = 1;  // STOP
  for (const auto& f : msg.fields) {
    n += 3;
    if (f.type == WireType::List) {
      const auto& list = std::get<ListValue>(f.value);
      n += 5;
      for (const auto& item : list.items) n += scalar_size(list.elem_type, item);
    } else {
      n += scalar_size(f.type, as_scalar(f.value));
    }
  }
  return n;
}

std::size_t field_units(const RpcMessage& msg) {
  std::size_t n = 0;
  for (const auto& f : msg.fields) {
    n += 1;
    if (f.type == WireType::List) n += std::get<ListValue>(f.value).items.size();
  }
  return n;
}

RpcMessage make_error_message(std::uint8_t method_id, std::uint32_t seq_id, ErrorStatus status) {
  RpcMessage m;
  m.seq_id = seq_id;
  m.method_id = method_id;
  m.direction = Direction::Error;
  m.fields.push_back(Field{1, WireType::I32, static_cast<std::int32_t>(status)});
  return m;
}

StageCosts request_stage_costs(const RpcMessage& request) {
  StageCosts c;
  c.deser_bytes = body_size(request);
  c.deser_fields = field_units(request);
  return c;
}

StageCosts stage_costs(const RpcMessage& request, const RpcMessage& response) {
  StageCosts c = request_stage_costs(request);
  c.ser_bytes = body_size(response);
  c.ser_fields = field_units(response);
  return c;
}

}  // namespace arcsim::wire
