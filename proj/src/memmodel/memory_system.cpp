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

#include "arcsim/memmodel/memory_system.hpp"

#include <algorithm>
#include <sstream>

namespace arcsim::mem {

void LatencyConfig::validate() const {
  auto positive = [](std::uint64_t v, const char* name) {
    if (v == 0) throw std::invalid_argument(std::string("latency.") + name + " must be > 0");
  };
  positive(cpu_freq_hz, "cpu_freq_hz");
  positive(accel_freq_hz, "accel_freq_hz");
  positive(l1_hit_cycles, "l1_hit_cycles");
  positive(l2_hit_cycles, "l2_hit_cycles");
  positive(llc_hit_cycles, "llc_hit_cycles");
  positive(dram_ns, "dram_ns");
  positive(accel_cache_hit_cycles, "accel_cache_hit_cycles");
  positive(uc_interconnect_ns, "uc_interconnect_ns");
  positive(tlb_hit_cycles, "tlb_hit_cycles");
  positive(page_walk_ns, "page_walk_ns");
  positive(dca_injection_ns, "dca_injection_ns");
  if (!(l1_hit_cycles < l2_hit_cycles && l2_hit_cycles < llc_hit_cycles)) {
    throw std::invalid_argument("latency: need l1_hit_cycles < l2_hit_cycles < llc_hit_cycles");
  }
  const double llc_ns = static_cast<double>(llc_hit_cycles) * 1e9 / static_cast<double>(cpu_freq_hz);
  if (!(static_cast<double>(dram_ns) > llc_ns)) throw std::invalid_argument("latency: dram_ns must exceed LLC latency");
}

void MemoryConfig::validate() const {
  auto cache_ok = [](std::size_t bytes, std::size_t assoc, const char* name) {
    if (bytes == 0 || assoc == 0 || bytes % (assoc * kLineBytes) != 0) {
      throw std::invalid_argument(std::string("memory.") + name + " must be a positive multiple of assoc x 64 B");
    }
  };
  cache_ok(l1_bytes, l1_assoc, "l1_bytes");
  cache_ok(l2_bytes, l2_assoc, "l2_bytes");
  cache_ok(llc_bytes, llc_assoc, "llc_bytes");
  cache_ok(accel_cache_bytes, accel_cache_assoc, "accel_cache_bytes");
  if (tlb_entries == 0) throw std::invalid_argument("memory.tlb_entries must be > 0");
  if (buffer_slot_bytes == 0 || buffer_slot_bytes % kLineBytes != 0) {
    throw std::invalid_argument("memory.buffer_slot_bytes must be a positive multiple of 64");
  }
  if (buffer_bytes < buffer_slot_bytes || buffer_bytes % buffer_slot_bytes != 0) {
    throw std::invalid_argument("memory.buffer_bytes must be a multiple of buffer_slot_bytes");
  }
  if (buffer_page_bytes != kPage4K && buffer_page_bytes != kPage2M) {
    throw std::invalid_argument("memory.buffer_page_bytes must be 4096 or 2097152");
  }
  if (buffer_bytes > RegionLayout::kBufferStride) throw std::invalid_argument("memory.buffer_bytes too large");
  if (cpu_mlp == 0 || accel_mlp == 0) throw std::invalid_argument("memory mlp must be >= 1");
}

std::string_view to_string(BufferId b) {
  switch (b) {
    case BufferId::NetRecv: return "NetRecv";
    case BufferId::NetResp: return "NetResp";
    case BufferId::AppRecv: return "AppRecv";
    case BufferId::AppResp: return "AppResp";
  }
  return "?";
}

SharedBuffer::SharedBuffer(BufferId id, std::uint64_t base, std::size_t capacity, std::size_t slot_bytes)
    : id_(id), base_(base), slot_bytes_(slot_bytes), used_(capacity / slot_bytes, false) {}

std::optional<std::uint64_t> SharedBuffer::allocate(std::size_t bytes) {
  const std::size_t need = std::max<std::size_t>(1, (bytes + slot_bytes_ - 1) / slot_bytes_);
  std::size_t run = 0;
  for (std::size_t i = 0; i < used_.size(); ++i) {
    run = used_[i] ? 0 : run + 1;
    if (run == need) {
      const std::size_t first = i + 1 - need;
      for (std::size_t j = first; j <= i; ++j) used_[j] = true;
      used_slots_ += need;
      const std::uint64_t vaddr = base_ + first * slot_bytes_;
      allocs_.emplace(vaddr, Alloc{first, need, bytes});
      return vaddr;
    }
  }
  return std::nullopt;
}

void SharedBuffer::release(std::uint64_t vaddr) {
  const auto it = allocs_.find(vaddr);
  if (it == allocs_.end()) {
    std::ostringstream msg;
    msg << to_string(id_) << ": release of unallocated address 0x" << std::hex << vaddr;
    throw std::logic_error(msg.str());
  }
  for (std::size_t j = it->second.first_slot; j < it->second.first_slot + it->second.slots; ++j) used_[j] = false;
  used_slots_ -= it->second.slots;
  allocs_.erase(it);
}

std::size_t SharedBuffer::stored_bytes(std::uint64_t vaddr) const {
  const auto it = allocs_.find(vaddr);
  return it == allocs_.end() ? 0 : it->second.bytes;
}

PageFault::PageFault(std::uint64_t vaddr) : std::runtime_error([vaddr] {
  std::ostringstream msg;
  msg << "page fault at 0x" << std::hex << vaddr;
  return msg.str();
}()), vaddr_(vaddr) {}

MemorySystem::MemorySystem(const LatencyConfig& lat, const MemoryConfig& cfg, std::size_t cpu_cores)
    : lat_(lat),
      cfg_(cfg),
      cpu_clock_("cpu", lat.cpu_freq_hz),
      accel_clock_("accel", lat.accel_freq_hz),
      llc_("llc", cfg.llc_bytes, cfg.llc_assoc),
      accel_cache_("accel", cfg.accel_cache_bytes, cfg.accel_cache_assoc),
      tlb_(cfg.tlb_entries) {
  lat_.validate();
  cfg_.validate();
  if (cpu_cores == 0 || cpu_cores >= kAccelAgent) throw std::invalid_argument("bad CPU core count");
  for (std::size_t c = 0; c < cpu_cores; ++c) {
    l1_.emplace_back("l1d" + std::to_string(c), cfg.l1_bytes, cfg.l1_assoc);
    l2_.emplace_back("l2_" + std::to_string(c), cfg.l2_bytes, cfg.l2_assoc);
  }
  for (std::size_t i = 0; i < kBufferCount; ++i) {
    const std::uint64_t base = RegionLayout::kBufferBase + i * RegionLayout::kBufferStride;
    buffers_[i] = std::make_unique<SharedBuffer>(static_cast<BufferId>(i), base, cfg.buffer_bytes,
                                                 cfg.buffer_slot_bytes);
    // The NIC DMAs into NetRecv, so its pages are always pinned and mapped.
    if (cfg.premap_buffers || static_cast<BufferId>(i) == BufferId::NetRecv) {
      page_table_.map_range(base, cfg.buffer_bytes, cfg.buffer_page_bytes);
    }
  }
}

namespace {

std::uint64_t page_size_for(const MemoryConfig& cfg, std::uint64_t vaddr) {
  const bool in_buffers = vaddr >= RegionLayout::kBufferBase &&
                          vaddr < RegionLayout::kBufferBase + kBufferCount * RegionLayout::kBufferStride;
  return in_buffers ? cfg.buffer_page_bytes : kPage4K;
}

}  // namespace

Translation MemorySystem::translate(AgentId agent, std::uint64_t vaddr) {
  if (agent == kAccelAgent) {
    if (auto m = tlb_.lookup(vaddr)) {
      ++stats_.tlb_hits;
      return Translation{m->translate(vaddr), accel_clock_.cycles_to_time(lat_.tlb_hit_cycles)};
    }
    const auto m = page_table_.lookup(vaddr);
    if (!m) {
      ++stats_.tlb_faults;
      throw PageFault(vaddr);
    }
    ++stats_.tlb_misses;
    tlb_.insert(*m);
    return Translation{m->translate(vaddr),
                       accel_clock_.cycles_to_time(lat_.tlb_hit_cycles) + SimTime::from_ns(lat_.page_walk_ns)};
  }
  if (auto m = page_table_.lookup(vaddr)) return Translation{m->translate(vaddr), SimTime{}};
  if (cfg_.heap_resident && vaddr >= RegionLayout::kAppHeapBase && vaddr < RegionLayout::kBufferBase) {
    const Mapping m = page_table_.map(vaddr, page_size_for(cfg_, vaddr));
    return Translation{m.translate(vaddr), SimTime{}};
  }
  ++stats_.host_page_faults;
  const Mapping m = page_table_.map(vaddr, page_size_for(cfg_, vaddr));
  return Translation{m.translate(vaddr), SimTime::from_ns(cfg_.os_page_fault_ns)};
}

void MemorySystem::host_touch(std::uint64_t vaddr) {
  if (!page_table_.lookup(vaddr)) {
    ++stats_.host_page_faults;
    page_table_.map(vaddr, page_size_for(cfg_, vaddr));
  }
}

AccessResult MemorySystem::access(AgentId agent, std::uint64_t vaddr, std::size_t size, AccessKind) {
  AccessResult r;
  if (size == 0) return r;
  const std::uint32_t mlp = agent == kAccelAgent ? cfg_.accel_mlp : cfg_.cpu_mlp;
  const std::uint64_t first = line_of(vaddr);
  const std::uint64_t last = line_of(vaddr + size - 1);
  std::uint64_t page_lo = 1, page_hi = 0, page_delta = 0;
  SimTime lines_total, group_max;
  std::uint32_t in_group = 0;
  for (std::uint64_t l = first; l <= last; ++l) {
    const std::uint64_t va = (l == first) ? vaddr : l * kLineBytes;
    if (va < page_lo || va > page_hi) {
      const Translation t = translate(agent, va);
      r.translation += t.latency;
      const std::uint64_t psize = page_table_.lookup(va)->page_bytes;
      page_lo = va / psize * psize;
      page_hi = page_lo + psize - 1;
      page_delta = t.paddr - va;
    }
    const SimTime lat = line_access(agent, line_of(va + page_delta));
    r.max_line = std::max(r.max_line, lat);
    group_max = std::max(group_max, lat);
    if (++in_group == mlp) {
      lines_total += group_max;
      group_max = SimTime{};
      in_group = 0;
    }
    ++r.lines;
  }
  lines_total += group_max;
  r.total = r.translation + lines_total;
  return r;
}

AgentId MemorySystem::owner_of_line(std::uint64_t pline) const {
  const auto it = owner_.find(pline);
  return it == owner_.end() ? kNoAgent : it->second;
}

bool MemorySystem::llc_resident(std::uint64_t vaddr) const {
  const auto m = page_table_.lookup(vaddr);
  return m && llc_.contains(line_of(m->translate(vaddr)));
}

void MemorySystem::drop_private(AgentId agent, std::uint64_t pline) {
  if (agent == kAccelAgent) {
    accel_cache_.invalidate(pline);
  } else if (agent < l1_.size()) {
    l1_[agent].invalidate(pline);
    l2_[agent].invalidate(pline);
  }
  owner_.erase(pline);
}

void MemorySystem::clear_owner_if(AgentId agent, std::uint64_t pline) {
  const auto it = owner_.find(pline);
  if (it != owner_.end() && it->second == agent) owner_.erase(it);
}

void MemorySystem::fill_llc(std::uint64_t pline) {
  if (const auto victim = llc_.insert(pline)) {
    const AgentId o = owner_of_line(*victim);
    if (o != kNoAgent) drop_private(o, *victim);
  }
}

void MemorySystem::fill_cpu(AgentId core, std::uint64_t pline) {
  if (const auto v2 = l2_[core].insert(pline)) {
    l1_[core].invalidate(*v2);
    clear_owner_if(core, *v2);
  }
  l1_[core].insert(pline);
  owner_[pline] = core;
}

void MemorySystem::fill_accel(std::uint64_t pline) {
  if (const auto v = accel_cache_.insert(pline)) clear_owner_if(kAccelAgent, *v);
  owner_[pline] = kAccelAgent;
}

SimTime MemorySystem::line_access(AgentId agent, std::uint64_t pline) {
  if (agent == kAccelAgent) {
    if (accel_cache_.touch(pline)) {
      ++stats_.accel_hits;
      return accel_clock_.cycles_to_time(lat_.accel_cache_hit_cycles);
    }
    ++stats_.accel_misses;
    const AgentId o = owner_of_line(pline);
    if (o != kNoAgent) {
      drop_private(o, pline);
      ++stats_.coherence_transfers;
    }
    SimTime lat = cpu_clock_.cycles_to_time(lat_.llc_hit_cycles);
    if (llc_.touch(pline)) {
      ++stats_.llc_hits;
    } else {
      ++stats_.llc_misses;
      ++stats_.dram_accesses;
      lat += SimTime::from_ns(lat_.dram_ns);
      fill_llc(pline);
    }
    fill_accel(pline);
    return lat;
  }

  const AgentId core = agent;
  if (l1_[core].touch(pline)) {
    ++stats_.l1_hits;
    return cpu_clock_.cycles_to_time(lat_.l1_hit_cycles);
  }
  ++stats_.l1_misses;
  if (l2_[core].touch(pline)) {
    ++stats_.l2_hits;
    l1_[core].insert(pline);
    return cpu_clock_.cycles_to_time(lat_.l1_hit_cycles + lat_.l2_hit_cycles);
  }
  ++stats_.l2_misses;
  const AgentId o = owner_of_line(pline);
  if (o != kNoAgent && o != core) {
    drop_private(o, pline);
    ++stats_.coherence_transfers;
  }
  SimTime lat = cpu_clock_.cycles_to_time(lat_.l1_hit_cycles + lat_.l2_hit_cycles + lat_.llc_hit_cycles);
  if (llc_.touch(pline)) {
    ++stats_.llc_hits;
  } else {
    ++stats_.llc_misses;
    ++stats_.dram_accesses;
    lat += SimTime::from_ns(lat_.dram_ns);
    fill_llc(pline);
  }
  fill_cpu(core, pline);
  return lat;
}

DcaResult MemorySystem::dca_inject(std::size_t bytes) {
  DcaResult r;
  auto& buf = buffer(BufferId::NetRecv);
  const auto vaddr = buf.allocate(bytes);
  if (!vaddr) {
    ++stats_.dca_drops;
    r.dropped = true;
    return r;
  }
  r.vaddr = *vaddr;
  for (std::uint64_t l = line_of(*vaddr); l <= line_of(*vaddr + std::max<std::size_t>(bytes, 1) - 1); ++l) {
    const auto m = page_table_.lookup(l * kLineBytes);
    const std::uint64_t pline = line_of(m->translate(l * kLineBytes));
    const AgentId o = owner_of_line(pline);
    if (o != kNoAgent) drop_private(o, pline);
    fill_llc(pline);
    ++stats_.dca_lines;
  }
  ++stats_.dca_packets;
  stats_.dca_bytes += bytes;
  r.latency = SimTime::from_ns(lat_.dca_injection_ns);
  return r;
}

}  // namespace arcsim::mem
