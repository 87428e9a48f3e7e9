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

#include "arcsim/memmodel/cache.hpp"
#include "arcsim/memmodel/tlb.hpp"
#include "arcsim/simkern/time.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <stdexcept>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace arcsim::mem {

using kern::SimTime;

struct LatencyConfig {
  std::uint64_t cpu_freq_hz = 4'000'000'000ULL;
  std::uint64_t accel_freq_hz = 1'000'000'000ULL;
  std::uint32_t l1_hit_cycles = 4;
  std::uint32_t l2_hit_cycles = 14;
  std::uint32_t llc_hit_cycles = 40;
  std::uint32_t dram_ns = 90;
  std::uint32_t accel_cache_hit_cycles = 2;
  /// One-way CPU to accelerator latency of an uncacheable command access.
  std::uint32_t uc_interconnect_ns = 40;
  std::uint32_t tlb_hit_cycles = 1;
  std::uint32_t page_walk_ns = 60;
  std::uint32_t dca_injection_ns = 100;

  /// Throws std::invalid_argument when a value is zero or the level
  /// ordering l1 < l2 < llc < dram does not hold.
  void validate() const;
};

struct MemoryConfig {
  std::size_t l1_bytes = 32 * 1024;
  std::size_t l1_assoc = 8;
  std::size_t l2_bytes = 512 * 1024;
  std::size_t l2_assoc = 8;
  std::size_t llc_bytes = 32 * 1024 * 1024;
  std::size_t llc_assoc = 16;
  std::size_t accel_cache_bytes = 512 * 1024;
  std::size_t accel_cache_assoc = 8;
  std::size_t tlb_entries = 64;
  std::size_t buffer_bytes = 256 * 1024;
  std::size_t buffer_slot_bytes = 2048;
  std::uint64_t buffer_page_bytes = kPage4K;
  bool premap_buffers = true;
  /// Lines of one access that overlap in flight (1 = fully serialized).
  std::uint32_t cpu_mlp = 1;
  std::uint32_t accel_mlp = 1;
  /// Host cost of populating a page on first touch.
  std::uint32_t os_page_fault_ns = 2000;
  /// The application heap is populated before the run (a preloaded store),
  /// so host first touches there cost nothing.
  bool heap_resident = true;

  void validate() const;
};

enum class BufferId : std::uint8_t { NetRecv = 0, NetResp = 1, AppRecv = 2, AppResp = 3 };
inline constexpr std::size_t kBufferCount = 4;
std::string_view to_string(BufferId b);

/// One of the four in-cache queues shared by the NIC, the cores and the
/// accelerator. Space is handed out in fixed slots, lowest address first,
/// so a lightly loaded buffer keeps reusing the same lines.
class SharedBuffer {
 public:
  SharedBuffer(BufferId id, std::uint64_t base, std::size_t capacity, std::size_t slot_bytes);

  BufferId id() const { return id_; }
  std::uint64_t base() const { return base_; }
  std::size_t capacity() const { return slot_bytes_ * used_.size(); }
  std::size_t occupancy() const { return used_slots_ * slot_bytes_; }
  bool contains(std::uint64_t vaddr) const { return vaddr >= base_ && vaddr < base_ + capacity(); }

  std::optional<std::uint64_t> allocate(std::size_t bytes);
  void release(std::uint64_t vaddr);
  std::size_t allocations() const { return allocs_.size(); }
  /// Bytes stored at `vaddr` by the allocation that starts there.
  std::size_t stored_bytes(std::uint64_t vaddr) const;

 private:
  struct Alloc {
    std::size_t first_slot;
    std::size_t slots;
    std::size_t bytes;
  };
  BufferId id_;
  std::uint64_t base_;
  std::size_t slot_bytes_;
  std::vector<bool> used_;
  std::size_t used_slots_ = 0;
  std::map<std::uint64_t, Alloc> allocs_;
};

/// Requester identity for the memory system: CPU cores are 0..n-1.
using AgentId = std::uint8_t;
inline constexpr AgentId kAccelAgent = 0xFE;
inline constexpr AgentId kNoAgent = 0xFF;

enum class AccessKind : std::uint8_t { Load, Store };

class PageFault : public std::runtime_error {
 public:
  explicit PageFault(std::uint64_t vaddr);
  std::uint64_t vaddr() const { return vaddr_; }

 private:
  std::uint64_t vaddr_;
};

struct Translation {
  std::uint64_t paddr = 0;
  SimTime latency;
};

struct AccessResult {
  SimTime translation;
  /// translation + line latencies combined under the requester's MLP.
  SimTime total;
  /// Slowest single line.
  SimTime max_line;
  std::size_t lines = 0;
};

struct MemoryStats {
  std::uint64_t l1_hits = 0, l1_misses = 0;
  std::uint64_t l2_hits = 0, l2_misses = 0;
  std::uint64_t llc_hits = 0, llc_misses = 0;
  std::uint64_t accel_hits = 0, accel_misses = 0;
  std::uint64_t dram_accesses = 0;
  std::uint64_t coherence_transfers = 0;
  std::uint64_t tlb_hits = 0, tlb_misses = 0, tlb_faults = 0;
  std::uint64_t host_page_faults = 0;
  std::uint64_t dca_packets = 0, dca_lines = 0, dca_bytes = 0, dca_drops = 0;
};

struct DcaResult {
  bool dropped = false;
  std::uint64_t vaddr = 0;
  SimTime latency;
};

struct RegionLayout {
  static constexpr std::uint64_t kBufferBase = 0x7F00'0000'0000ULL;
  static constexpr std::uint64_t kBufferStride = 0x4000'0000ULL;  // 1 GiB, 2 MiB aligned
  static constexpr std::uint64_t kAppHeapBase = 0x5000'0000'0000ULL;
};

/// Latency-class model of the cache hierarchy. Each CPU core has private
/// inclusive L1/L2, the accelerator has its own cache, and all of them sit
/// under a shared inclusive LLC. A line is owned by at most one private
/// hierarchy; a request from another agent migrates it at LLC latency.
class MemorySystem {
 public:
  MemorySystem(const LatencyConfig& lat, const MemoryConfig& cfg, std::size_t cpu_cores);

  const LatencyConfig& latency() const { return lat_; }
  const MemoryConfig& config() const { return cfg_; }
  const kern::ClockDomain& cpu_clock() const { return cpu_clock_; }
  const kern::ClockDomain& accel_clock() const { return accel_clock_; }

  /// Timed access of [vaddr, vaddr+size). The accelerator raises PageFault
  /// on an unmapped page; CPU cores populate the page and pay the OS cost.
  AccessResult access(AgentId agent, std::uint64_t vaddr, std::size_t size, AccessKind kind);
  Translation translate(AgentId agent, std::uint64_t vaddr);

  /// NIC write-allocate of a packet into NetRecv: lines become LLC-resident
  /// and are dropped from every private cache. Never touches DRAM.
  DcaResult dca_inject(std::size_t bytes);

  /// The host touches the page so the OS populates it.
  void host_touch(std::uint64_t vaddr);

  SharedBuffer& buffer(BufferId id) { return *buffers_[static_cast<std::size_t>(id)]; }
  const SharedBuffer& buffer(BufferId id) const { return *buffers_[static_cast<std::size_t>(id)]; }

  const MemoryStats& stats() const { return stats_; }
  const SetAssocCache& accel_cache() const { return accel_cache_; }
  const SetAssocCache& llc() const { return llc_; }
  const Tlb& tlb() const { return tlb_; }
  PageTable& page_table() { return page_table_; }
  AgentId owner_of_line(std::uint64_t line) const;
  bool llc_resident(std::uint64_t vaddr) const;

 private:
  SimTime line_access(AgentId agent, std::uint64_t pline);
  void drop_private(AgentId agent, std::uint64_t pline);
  void fill_llc(std::uint64_t pline);
  void fill_cpu(AgentId core, std::uint64_t pline);
  void fill_accel(std::uint64_t pline);
  void clear_owner_if(AgentId agent, std::uint64_t pline);

  LatencyConfig lat_;
  MemoryConfig cfg_;
  kern::ClockDomain cpu_clock_;
  kern::ClockDomain accel_clock_;
  std::vector<SetAssocCache> l1_;
  std::vector<SetAssocCache> l2_;
  SetAssocCache llc_;
  SetAssocCache accel_cache_;
  Tlb tlb_;
  PageTable page_table_;
  std::unordered_map<std::uint64_t, AgentId> owner_;
  std::array<std::unique_ptr<SharedBuffer>, kBufferCount> buffers_;
  MemoryStats stats_;
};

}  // namespace arcsim::mem
