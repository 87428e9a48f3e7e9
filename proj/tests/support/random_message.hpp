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
#include "arcsim/workload/rng.hpp"

namespace arcsim::testing {

inline wire::ScalarValue random_scalar(wire::WireType t, workload::SplitMix64& rng) {
  using wire::WireType;
  switch (t) {
    case WireType::Bool: return rng.below(2) == 1;
    case WireType::I8: return static_cast<std::int8_t>(rng.next());
    case WireType::I16: return static_cast<std::int16_t>(rng.next());
    case WireType::I32: return static_cast<std::int32_t>(rng.next());
    case WireType::I64: return static_cast<std::int64_t>(rng.next());
    default: {
      // Mostly short strings, occasionally a few KiB.
      const std::size_t n = rng.below(16) == 0 ? rng.below(4096) : rng.below(72);
      std::string s(n, '\0');
      for (auto& c : s) c = static_cast<char>(rng.next() & 0xFF);
      return s;
    }
  }
}

/// A random message that validates against `schema` for `method`.
inline wire::RpcMessage random_message(const wire::ServiceSchema& schema, const wire::MethodSchema& method,
                                       wire::Direction dir, workload::SplitMix64& rng) {
  wire::RpcMessage m;
  m.seq_id = static_cast<std::uint32_t>(rng.next());
  m.method_id = method.id;
  m.direction = dir;
  const auto& fields = dir == wire::Direction::Request ? method.request : method.response;
  for (const auto& fs : fields) {
    wire::Field f;
    f.id = fs.id;
    f.type = fs.type;
    if (fs.type == wire::WireType::List) {
      wire::ListValue lv;
      lv.elem_type = fs.elem_type;
      const std::size_t n = rng.below(13);
      for (std::size_t i = 0; i < n; ++i) lv.items.push_back(random_scalar(fs.elem_type, rng));
      f.value = std::move(lv);
    } else {
      std::visit([&](auto&& v) { f.value = v; }, random_scalar(fs.type, rng));
    }
    m.fields.push_back(std::move(f));
  }
  (void)schema;
  return m;
}

}  // namespace arcsim::testing
