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
#include "arcsim/cores/business_logic.hpp"

#include "arcsim/workload/rng.hpp"
#include "arcsim/workload/workload.hpp"

#include <bit>

namespace arcsim::cores {

namespace {

using wire::Field;
using wire::RpcMessage;
using wire::WireType;

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xCBF29CE484222325ULL) {
  for (const char c : s) h = (h ^ static_cast<std::uint8_t>(c)) * 0x100000001B3ULL;
  return h;
}

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

const std::string& string_of(const RpcMessage& m, std::uint16_t id) {
  static const std::string empty;
  const Field* f = m.find(id);
  if (f == nullptr) return empty;
  const auto* s = std::get_if<std::string>(&f->value);
  return s ? *s : empty;
}

std::int64_t i64_of(const RpcMessage& m, std::uint16_t id) {
  const Field* f = m.find(id);
  if (f == nullptr) return 0;
  const auto* v = std::get_if<std::int64_t>(&f->value);
  return v ? *v : 0;
}

RpcMessage response_to(const RpcMessage& req) {
  RpcMessage r;
  r.seq_id = req.seq_id;
  r.method_id = req.method_id;
  r.direction = wire::Direction::Response;
  return r;
}

class LogicBase : public ServiceLogic {
 public:
  LogicBase(const wire::ServiceSchema& schema, const LogicConfig& cfg, const ServiceParams& p)
      : schema_(schema), cfg_(cfg), params_(p) {}

 protected:
  const MethodCost& cost_of(const RpcMessage& req) const {
    return cfg_.cost(schema_.find_method(req.method_id)->name);
  }
  /// Metadata lines touched by `n` accesses keyed on `h`.
  void meta(std::vector<MemRef>& refs, std::uint64_t h, std::uint32_t n, mem::AccessKind kind) const {
    for (std::uint32_t j = 0; j < n; ++j) {
      const std::uint64_t line = mix64(h + j) % (HeapLayout::kMetaBytes / mem::kLineBytes);
      refs.push_back({HeapLayout::kMeta + line * mem::kLineBytes, 8, kind});
    }
  }

  const wire::ServiceSchema& schema_;
  LogicConfig cfg_;
  ServiceParams params_;
};

class Memcached final : public LogicBase {
 public:
  using LogicBase::LogicBase;

  LogicResult execute(const RpcMessage& req) override {
    static constexpr std::size_t kItemHeader = 48;
    const std::string& name = schema_.find_method(req.method_id)->name;
    const std::string& key = string_of(req, 1);
    const std::uint64_t h = fnv1a(key);
    const std::uint64_t nbuckets = std::bit_ceil(std::max<std::uint64_t>(params_.keyspace_n, 1));
    const MethodCost& c = cost_of(req);
    LogicResult out;
    out.response = response_to(req);
    out.refs.push_back({HeapLayout::kBuckets + (h & (nbuckets - 1)) * 8, 8, mem::AccessKind::Load});
    if (name == "SET") {
      const std::string& value = string_of(req, 2);
      const std::uint64_t item = place(key, kItemHeader + key.size() + value.size());
      out.refs.push_back({item, kItemHeader + key.size() + value.size(), mem::AccessKind::Store});
      meta(out.refs, h, c.meta_accesses, mem::AccessKind::Store);
      store_[key] = value;
      out.response.fields.push_back(Field{1, WireType::Bool, true});
      out.compute = c.eval(key.size() + value.size());
    } else {
      auto it = store_.find(key);
      if (it == store_.end()) {
        it = store_.emplace(key, workload::preload_value(params_.seed, key, params_.value_size)).first;
      }
      const std::string& value = it->second;
      const std::uint64_t item = place(key, kItemHeader + key.size() + value.size());
      out.refs.push_back({item, kItemHeader + key.size() + value.size(), mem::AccessKind::Load});
      meta(out.refs, h, c.meta_accesses, mem::AccessKind::Load);
      out.response.fields.push_back(Field{1, WireType::Bytes, value});
      out.compute = c.eval(key.size() + value.size());
    }
    return out;
  }

 private:
  struct Item {
    std::uint64_t addr;
    std::size_t cap;
  };
  /// Item address of `key`; a value that outgrows its slot moves.
  std::uint64_t place(const std::string& key, std::size_t bytes) {
    const std::size_t need = (bytes + mem::kLineBytes - 1) / mem::kLineBytes * mem::kLineBytes;
    auto it = items_.find(key);
    if (it != items_.end() && it->second.cap >= need) return it->second.addr;
    const Item item{HeapLayout::kItems + next_, need};
    next_ += need;
    items_[key] = item;
    return item.addr;
  }

  std::unordered_map<std::string, std::string> store_;
  std::unordered_map<std::string, Item> items_;
  std::uint64_t next_ = 0;
};

class PostStorage final : public LogicBase {
 public:
  using LogicBase::LogicBase;

  LogicResult execute(const RpcMessage& req) override {
    const std::string& name = schema_.find_method(req.method_id)->name;
    const MethodCost& c = cost_of(req);
    LogicResult out;
    out.response = response_to(req);
    std::size_t bytes = 0;
    if (name == "StorePost") {
      const std::int64_t id = i64_of(req, 2);
      const std::string& text = string_of(req, 4);
      index(out.refs, id);
      out.refs.push_back({slot(id), kPostHeader + text.size(), mem::AccessKind::Store});
      meta(out.refs, static_cast<std::uint64_t>(id), c.meta_accesses, mem::AccessKind::Store);
      posts_[id] = text;
      bytes = text.size();
      out.response.fields.push_back(Field{1, WireType::Bool, true});
    } else if (name == "ReadPost") {
      const std::int64_t id = i64_of(req, 2);
      const std::string& text = read(out.refs, id);
      meta(out.refs, static_cast<std::uint64_t>(id), c.meta_accesses, mem::AccessKind::Load);
      bytes = text.size();
      out.response.fields.push_back(Field{1, WireType::String, text});
    } else {
      wire::ListValue posts;
      posts.elem_type = WireType::String;
      if (const Field* f = req.find(2)) {
        if (const auto* ids = std::get_if<wire::ListValue>(&f->value)) {
          for (const auto& v : ids->items) {
            const auto* id = std::get_if<std::int64_t>(&v);
            const std::string& text = read(out.refs, id ? *id : 0);
            bytes += text.size();
            posts.items.emplace_back(text);
          }
        }
      }
      meta(out.refs, static_cast<std::uint64_t>(i64_of(req, 1)), c.meta_accesses, mem::AccessKind::Load);
      out.response.fields.push_back(Field{1, WireType::List, std::move(posts)});
    }
    out.compute = c.eval(bytes);
    return out;
  }

 private:
  static constexpr std::size_t kPostHeader = 64;
  static constexpr std::uint64_t kPostStride = 512;
  static constexpr std::uint64_t kIndexLines = 1 << 14;

  /// Fixed-stride post slots; texts longer than a slot spill into the next
  /// ones, which only affects timing.
  static std::uint64_t slot(std::int64_t id) {
    return HeapLayout::kPosts + (static_cast<std::uint64_t>(id) % (1u << 20)) * kPostStride;
  }
  void index(std::vector<MemRef>& refs, std::int64_t id) const {
    refs.push_back({HeapLayout::kBuckets + (mix64(static_cast<std::uint64_t>(id)) % kIndexLines) * mem::kLineBytes, 8,
                    mem::AccessKind::Load});
  }
  const std::string& read(std::vector<MemRef>& refs, std::int64_t id) {
    index(refs, id);
    auto it = posts_.find(id);
    if (it == posts_.end()) it = posts_.emplace(id, preload_post(params_.seed, id, params_.text_size)).first;
    refs.push_back({slot(id), kPostHeader + it->second.size(), mem::AccessKind::Load});
    return it->second;
  }

  std::unordered_map<std::int64_t, std::string> posts_;
};

class UniqueId final : public LogicBase {
 public:
  using LogicBase::LogicBase;

  LogicResult execute(const RpcMessage& req) override {
    LogicResult out;
    out.response = response_to(req);
    // Machine id in the top bits, a per-instance counter below; no key or
    // value state is involved.
    const std::int64_t id = static_cast<std::int64_t>((std::uint64_t{1} << 52) | ++counter_);
    out.response.fields.push_back(Field{1, WireType::I64, id});
    out.refs.push_back({HeapLayout::kCounter, 8, mem::AccessKind::Store});
    out.compute = cost_of(req).eval(0);
    return out;
  }

 private:
  std::uint64_t counter_ = 0;
};

}  // namespace

std::string preload_post(std::uint64_t seed, std::int64_t post_id, std::size_t size) {
  workload::SplitMix64 rng(workload::SplitMix64::derive_seed(seed, 0x706F7374ULL ^ static_cast<std::uint64_t>(post_id)));
  std::string s(size, 'a');
  for (auto& ch : s) ch = static_cast<char>('a' + rng.below(26));
  return s;
}

std::unique_ptr<ServiceLogic> ServiceLogic::create(const wire::ServiceSchema& schema, const LogicConfig& cfg,
                                                   const ServiceParams& params) {
  cfg.validate();
  for (const auto& m : schema.methods) (void)cfg.cost(m.name);
  if (schema.service_name == "memcached") return std::make_unique<Memcached>(schema, cfg, params);
  if (schema.service_name == "post_storage") return std::make_unique<PostStorage>(schema, cfg, params);
  if (schema.service_name == "unique_id") return std::make_unique<UniqueId>(schema, cfg, params);
  throw std::invalid_argument("no business logic for service " + schema.service_name);
}

}  // namespace arcsim::cores
