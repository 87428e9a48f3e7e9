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

#include "arcsim/cores/cost_models.hpp"
#include "arcsim/memmodel/memory_system.hpp"
#include "arcsim/wirecodec/codec.hpp"

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace arcsim::cores {

struct MemRef {
  std::uint64_t vaddr = 0;
  std::size_t size = 0;
  mem::AccessKind kind = mem::AccessKind::Load;
};

struct LogicResult {
  wire::RpcMessage response;
  StageWork compute;
  std::vector<MemRef> refs;
};

struct ServiceParams {
  std::uint64_t seed = 1;
  std::uint64_t keyspace_n = 100000;
  std::size_t value_size = 64;
  std::size_t text_size = 256;
};

/// Functional service plus its cost model. The same instance type runs on
/// the AppCore and on the baseline core, so responses and costs agree
/// between modes.
class ServiceLogic {
 public:
  virtual ~ServiceLogic() = default;
  /// Executes a decoded request. Requests of unknown methods never reach
  /// this point (the receive path rejects them).
  virtual LogicResult execute(const wire::RpcMessage& request) = 0;

  static std::unique_ptr<ServiceLogic> create(const wire::ServiceSchema& schema, const LogicConfig& cfg,
                                              const ServiceParams& params);
};

/// Heap layout of the service data structures.
struct HeapLayout {
  static constexpr std::uint64_t kBuckets = mem::RegionLayout::kAppHeapBase;
  static constexpr std::uint64_t kMeta = mem::RegionLayout::kAppHeapBase + 0x1000'0000ULL;
  static constexpr std::uint64_t kMetaBytes = 1 << 20;
  static constexpr std::uint64_t kItems = mem::RegionLayout::kAppHeapBase + 0x4000'0000ULL;
  static constexpr std::uint64_t kPosts = mem::RegionLayout::kAppHeapBase + 0x8000'0000ULL;
  static constexpr std::uint64_t kCounter = mem::RegionLayout::kAppHeapBase + 0xC000'0000ULL;
};

/// Default post text for an id never written in this run.
std::string preload_post(std::uint64_t seed, std::int64_t post_id, std::size_t size);

}  // namespace arcsim::cores
