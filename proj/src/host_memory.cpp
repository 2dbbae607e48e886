// Copyright 2026 the nvmesim authors
// SPDX-License-Identifier: Apache-2.0

#include "nvmesim/host_memory.hpp"

namespace nvmesim::hostsim {

Result<Unit, IommuConfigError> DmaEngine::configure(IommuConfig cfg) {
  for (const auto& [dev, ranges] : cfg.allow) {
    for (const auto& r : ranges) {
      if (r.base % cfg.page_size != 0 || r.size % cfg.page_size != 0 || r.size == 0) {
        return Result<Unit, IommuConfigError>::error(IommuConfigError::kMisaligned,
                                                     "allow range for " + dev);
      }
    }
  }
  std::map<std::string, int> seen;
  for (const auto& g : cfg.groups) {
    for (const auto& dev : g) {
      if (++seen[dev] > 1) {
        return Result<Unit, IommuConfigError>::error(IommuConfigError::kBadGroups,
                                                     dev + " in multiple groups");
      }
    }
  }
  cfg_ = std::move(cfg);
  if (log_) {
    log_->emit("iommu", "config-applied",
               {{"enabled", cfg_.enabled}, {"devices", cfg_.allow.size()}});
  }
  return Unit{};
}

bool DmaEngine::same_group(const std::string& a, const std::string& b) const {
  for (const auto& g : cfg_.groups) {
    bool has_a = false, has_b = false;
    for (const auto& dev : g) {
      has_a |= dev == a;
      has_b |= dev == b;
    }
    if (has_a && has_b) return true;
  }
  return false;
}

bool DmaEngine::page_allowed(const std::string& device, uint64_t page_base) const {
  auto it = cfg_.allow.find(device);
  if (it != cfg_.allow.end()) {
    for (const auto& r : it->second) {
      if (page_base >= r.base && page_base < r.base + r.size) return true;
    }
  }
  // Peer access: pages of a stub belonging to a device in the same group.
  for (const auto& [peer, stub] : peer_stubs_) {
    if (peer == device) continue;
    if (page_base >= stub.base && page_base < stub.base + stub.size && same_group(device, peer)) {
      return true;
    }
  }
  return false;
}

DmaFault DmaEngine::fault(const std::string& device, uint64_t addr, uint64_t len, DmaDir dir,
                          DmaFaultReason reason) {
  DmaFault f{device, addr, len, dir, reason};
  if (log_) {
    log_->emit("iommu", "dma-fault",
               {{"device", device},
                {"addr", addr},
                {"len", len},
                {"dir", dir == DmaDir::kRead ? "read" : "write"},
                {"reason", reason == DmaFaultReason::kUnmapped ? "unmapped" : "disabled-device"}});
  }
  return f;
}

Result<Unit, DmaFault> DmaEngine::check(const std::string& device, uint64_t addr, uint64_t len,
                                        DmaDir dir) {
  if (len == 0 || addr + len < addr || addr + len > mem_.size()) {
    return Result<Unit, DmaFault>::error(fault(device, addr, len, dir, DmaFaultReason::kUnmapped));
  }
  if (!cfg_.enabled) return Unit{};
  // A device the IOMMU has no allow entry for is denied wholesale.
  const DmaFaultReason deny_reason =
      cfg_.allow.count(device) ? DmaFaultReason::kUnmapped : DmaFaultReason::kDisabledDevice;
  const uint64_t first = addr / cfg_.page_size;
  const uint64_t last = (addr + len - 1) / cfg_.page_size;
  for (uint64_t p = first; p <= last; p++) {
    if (!page_allowed(device, p * cfg_.page_size)) {
      return Result<Unit, DmaFault>::error(fault(device, addr, len, dir, deny_reason));
    }
  }
  return Unit{};
}

Result<Bytes, DmaFault> DmaEngine::dma_read(const std::string& device, uint64_t addr,
                                            uint64_t len) {
  if (auto r = check(device, addr, len, DmaDir::kRead); !r) {
    return Result<Bytes, DmaFault>::error(r.error_code(), "");
  }
  return mem_.read(addr, len);
}

Result<Unit, DmaFault> DmaEngine::dma_write(const std::string& device, uint64_t addr,
                                            std::span<const uint8_t> data) {
  if (auto r = check(device, addr, data.size(), DmaDir::kWrite); !r) return r;
  mem_.write(addr, data);
  if (const Region* k = mem_.region("kernel"); k && k->overlaps(addr, data.size())) {
    pending_kernel_write_ = true;
  }
  return Unit{};
}

}  // namespace nvmesim::hostsim
