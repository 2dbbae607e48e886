// Copyright 2026 the nvmesim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstring>

namespace nvmesim::dev {

// Register map, NVMe-over-PCIe transport layout. Offsets documented in
// docs/registers.md.
constexpr uint64_t kRegCap = 0x00;        // RO, 64-bit
constexpr uint64_t kRegVersion = 0x08;    // RO
constexpr uint64_t kRegIntms = 0x0c;      // stub
constexpr uint64_t kRegIntmc = 0x10;      // stub
constexpr uint64_t kRegCc = 0x14;
constexpr uint64_t kRegCsts = 0x1c;
constexpr uint64_t kRegAqa = 0x24;
constexpr uint64_t kRegAsq = 0x28;        // 64-bit
constexpr uint64_t kRegAcq = 0x30;        // 64-bit
constexpr uint64_t kRegDoorbellBase = 0x1000;
constexpr uint64_t kRegMapEnd = 0x2000;

constexpr uint32_t kDoorbellStrideShift = 1;  // CAP.DSTRD = 1 -> 8-byte stride
constexpr uint32_t kDoorbellStride = 4u << kDoorbellStrideShift;

// CC fields
constexpr uint32_t kCcEnable = 1u << 0;
constexpr uint32_t kCcShnShift = 14;
constexpr uint32_t kCcShnMask = 0x3u << kCcShnShift;  // 01 normal, 10 abrupt

// CSTS fields
constexpr uint32_t kCstsReady = 1u << 0;
constexpr uint32_t kCstsCfs = 1u << 1;
constexpr uint32_t kCstsShstShift = 2;
constexpr uint32_t kCstsShstMask = 0x3u << kCstsShstShift;
enum class ShutdownStatus : uint32_t { kNormal = 0, kProcessing = 1, kComplete = 2 };

// Admin opcodes
constexpr uint8_t kAdminDeleteIoSq = 0x00;
constexpr uint8_t kAdminCreateIoSq = 0x01;
constexpr uint8_t kAdminGetLogPage = 0x02;
constexpr uint8_t kAdminDeleteIoCq = 0x04;
constexpr uint8_t kAdminCreateIoCq = 0x05;
constexpr uint8_t kAdminIdentify = 0x06;
constexpr uint8_t kAdminSetFeatures = 0x09;
constexpr uint8_t kAdminGetFeatures = 0x0a;

// NVM command set opcodes
constexpr uint8_t kNvmFlush = 0x00;
constexpr uint8_t kNvmWrite = 0x01;
constexpr uint8_t kNvmRead = 0x02;

// Generic status codes (SCT 0)
constexpr uint16_t kScSuccess = 0x00;
constexpr uint16_t kScInvalidOpcode = 0x01;
constexpr uint16_t kScInvalidField = 0x02;
constexpr uint16_t kScDataTransferError = 0x04;
constexpr uint16_t kScInternalError = 0x06;
constexpr uint16_t kScInvalidNamespace = 0x0b;
constexpr uint16_t kScLbaOutOfRange = 0x80;

// Command-specific status codes (SCT 1)
constexpr uint16_t kScCompletionQueueInvalid = 0x100;
constexpr uint16_t kScInvalidQueueId = 0x101;
constexpr uint16_t kScInvalidQueueSize = 0x102;

constexpr uint16_t kFeatNumberOfQueues = 0x07;

// 64-byte command as it crosses the simulated wire.
struct SubmissionEntry {
  uint8_t opcode = 0;
  uint8_t flags = 0;
  uint16_t cid = 0;
  uint32_t nsid = 0;
  uint32_t cdw2 = 0;
  uint32_t cdw3 = 0;
  uint64_t mptr = 0;
  uint64_t prp1 = 0;
  uint64_t prp2 = 0;
  uint32_t cdw10 = 0;
  uint32_t cdw11 = 0;
  uint32_t cdw12 = 0;
  uint32_t cdw13 = 0;
  uint32_t cdw14 = 0;
  uint32_t cdw15 = 0;

  uint64_t slba() const { return (static_cast<uint64_t>(cdw11) << 32) | cdw10; }
  void set_slba(uint64_t lba) {
    cdw10 = static_cast<uint32_t>(lba);
    cdw11 = static_cast<uint32_t>(lba >> 32);
  }
  // Block count; cdw12 carries count-1 in its low 16 bits.
  uint32_t nlb() const { return (cdw12 & 0xffff) + 1; }
  void set_nlb(uint32_t count) { cdw12 = (cdw12 & ~0xffffu) | ((count - 1) & 0xffff); }
};
static_assert(sizeof(SubmissionEntry) == 64, "submission entry is 64 bytes on the wire");

// 16-byte completion. Status word: bit 0 phase, bits 15:1 status field
// (SC in [9:1], SCT in [12:10]).
struct CompletionEntry {
  uint32_t result = 0;
  uint32_t reserved = 0;
  uint16_t sq_head = 0;
  uint16_t sq_id = 0;
  uint16_t cid = 0;
  uint16_t status = 0;

  uint16_t phase() const { return status & 0x1; }
  uint16_t status_code() const { return (status >> 1) & 0x7fff; }
  bool success() const { return status_code() == kScSuccess; }
};
static_assert(sizeof(CompletionEntry) == 16, "completion entry is 16 bytes on the wire");

inline uint64_t sq_doorbell_offset(uint16_t qid) {
  return kRegDoorbellBase + (2ull * qid) * kDoorbellStride;
}
inline uint64_t cq_doorbell_offset(uint16_t qid) {
  return kRegDoorbellBase + (2ull * qid + 1) * kDoorbellStride;
}

}  // namespace nvmesim::dev
