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

#include "arcsim/accel/engine_model.hpp"

#include <stdexcept>

namespace arcsim::accel {

void EngineCostModel::validate() const {
  if (header_parse_per_byte < 0 || deser_per_byte < 0 || ser_per_byte < 0) {
    throw std::invalid_argument("engine per-byte costs must be >= 0");
  }
}

namespace {

std::size_t scalar_record_bytes(const wire::ScalarValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return 8 + s->size();
  return 8;
}

}  // namespace

std::size_t record_bytes(const wire::RpcMessage& msg) {
  std::size_t n = 16;
  for (const auto& f : msg.fields) {
    n += 8;
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::string>) {
            n += v.size();
          } else if constexpr (std::is_same_v<T, wire::ListValue>) {
            for (const auto& item : v.items) n += scalar_record_bytes(item);
          }
        },
        f.value);
  }
  return n;
}

RecvOutcome recv_decode(std::span<const std::uint8_t> frame, const wire::ServiceSchema& schema) {
  RecvOutcome out;
  wire::Header h;
  try {
    h = wire::parse_header(frame);
  } catch (const wire::CodecError&) {
    out.status = wire::ErrorStatus::MalformedFrame;
    return out;
  }
  out.method_id = h.method_id;
  out.seq_id = h.seq_id;
  out.stages_run = 1;
  if (h.direction != wire::Direction::Request) {
    out.status = wire::ErrorStatus::MalformedFrame;
    return out;
  }
  if (schema.find_method(h.method_id) == nullptr) {
    out.status = wire::ErrorStatus::UnknownMethod;
    return out;
  }
  out.stages_run = 2;
  try {
    out.request = wire::deserialize(frame, schema).message;
  } catch (const wire::CodecError& e) {
    out.status = e.code() == wire::CodecErrc::UnknownMethod ? wire::ErrorStatus::UnknownMethod
                                                            : wire::ErrorStatus::MalformedFrame;
    return out;
  }
  out.ok = true;
  return out;
}

bool response_complete(const wire::RpcMessage& msg, const wire::ServiceSchema& schema) {
  const wire::MethodSchema* method = schema.find_method(msg.method_id);
  if (method == nullptr || msg.direction != wire::Direction::Response) return false;
  for (const auto& fs : method->response) {
    if (msg.find(fs.id) == nullptr) return false;
  }
  try {
    wire::validate(msg, schema);
  } catch (const wire::CodecError&) {
    return false;
  }
  return true;
}

}  // namespace arcsim::accel
