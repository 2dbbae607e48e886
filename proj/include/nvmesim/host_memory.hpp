// Copyright 2026 the nvmesim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nvmesim/common.hpp"

namespace nvmesim::hostsim {

struct Region {
  std::string name;  // kernel | queue-area | data-buffers | other
  uint64_t base = 0;
  uint64_t size = 0;

  bool contains(uint64_t addr) const { return addr >= base && addr < base + size; }
  bool overlaps(uint64_t addr, uint64_t len) const {
    return addr < base + size && addr + len > base;
  }
};

// Flat simulated physical address space. Host-side (CPU) accesses go straight
// through; device-side accesses must go through the DmaEngine below.
class HostMemory {
 public:
  explicit HostMemory(uint64_t size) : content_(size, 0) {}

  uint64_t size() const { return content_.size(); }

  void add_region(Region r) { regions_.push_back(std::move(r)); }
  const std::vector<Region>& regions() const { return regions_; }
  const Region* region(std::string_view name) const {
    for (const auto& r : regions_) {
      if (r.name == name) return &r;
    }
    return nullptr;
  }

  std::span<uint8_t> span(uint64_t addr, uint64_t len) {
    return std::span<uint8_t>(content_).subspan(addr, len);
  }
  std::span<const uint8_t> span(uint64_t addr, uint64_t len) const {
    return std::span<const uint8_t>(content_).subspan(addr, len);
  }

  void write(uint64_t addr, std::span<const uint8_t> data) {
    std::memcpy(content_.data() + addr, data.data(), data.size());
  }
  Bytes read(uint64_t addr, uint64_t len) const {
    return Bytes(content_.begin() + addr, content_.begin() + addr + len);
  }

  template <typename T>
  void write_pod(uint64_t addr, const T& v) {
    std::memcpy(content_.data() + addr, &v, sizeof(T));
  }
  template <typename T>
  T read_pod(uint64_t addr) const {
    T v;
    std::memcpy(&v, content_.data() + addr, sizeof(T));
    return v;
  }

 private:
  Bytes content_;
  std::vector<Region> regions_;
};

struct PhysRange {
  uint64_t base = 0;
  uint64_t size = 0;
};

// Physical-page allow-list model of the IOMMU. Reachability of regions is
// what the threat scenarios depend on, so there is no IOVA remapping layer:
// a device either may or may not touch a physical page.
struct IommuConfig {
  bool enabled = false;
  uint64_t page_size = 4096;
  std::map<std::string, std::vector<PhysRange>> allow;  // device id -> page ranges
  std::vector<std::vector<std::string>> groups;         // partition of device ids
};

enum class DmaDir { kRead, kWrite };

enum class DmaFaultReason { kUnmapped, kDisabledDevice };

struct DmaFault {
  std::string device;
  uint64_t address = 0;
  uint64_t length = 0;
  DmaDir dir = DmaDir::kRead;
  DmaFaultReason reason = DmaFaultReason::kUnmapped;
};

enum class IommuConfigError { kMisaligned, kBadGroups };

// Gate between DMA-capable devices and physical memory. All device-initiated
// accesses funnel through here; faults are all-or-nothing per request.
class DmaEngine {
 public:
  DmaEngine(HostMemory& mem, EventLog* log) : mem_(mem), log_(log) {}

  Result<Unit, IommuConfigError> configure(IommuConfig cfg);
  const IommuConfig& config() const { return cfg_; }
  void set_enabled(bool on) { cfg_.enabled = on; }

  // Peer device MMIO stubs live in the physical space; a device may reach a
  // stub of a device in its own IOMMU group even when the allow-list says no.
  void register_peer_stub(const std::string& device, PhysRange stub) {
    peer_stubs_[device] = stub;
  }

  Result<Bytes, DmaFault> dma_read(const std::string& device, uint64_t addr, uint64_t len);
  Result<Unit, DmaFault> dma_write(const std::string& device, uint64_t addr,
                                   std::span<const uint8_t> data);

  // Set when a device write landed in the kernel region; the host actor
  // consumes it on its next turn.
  bool take_pending_kernel_write() {
    bool v = pending_kernel_write_;
    pending_kernel_write_ = false;
    return v;
  }

 private:
  Result<Unit, DmaFault> check(const std::string& device, uint64_t addr, uint64_t len,
                               DmaDir dir);
  bool page_allowed(const std::string& device, uint64_t page_base) const;
  bool same_group(const std::string& a, const std::string& b) const;
  DmaFault fault(const std::string& device, uint64_t addr, uint64_t len, DmaDir dir,
                 DmaFaultReason reason);

  HostMemory& mem_;
  EventLog* log_;
  IommuConfig cfg_;
  std::map<std::string, PhysRange> peer_stubs_;
  bool pending_kernel_write_ = false;
};

}  // namespace nvmesim::hostsim
