// Copyright 2026 the nvmesim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "nvmesim/common.hpp"

namespace nvmesim::backend {

enum class StoreMode { kNormal, kCorrupt, kBrick, kCipher };

enum class StoreError {
  kRangeError,
  kDeviceDead,
  kCapacityMismatch,
  kModeLocked,
  kIoError,
};

const char* to_string(StoreMode mode);

// Opaque full-store image used by snapshot()/restore(). On disk this is the
// same raw little-endian byte dump a host would see, no header.
struct StoreImage {
  uint32_t block_size = 0;
  uint64_t block_count = 0;
  Bytes data;
};

// Block storage behind the controller. Normal IO lands here after the
// adversarial taps; the failure modes model a device that lies, dies, or
// ciphers its own content.
class BlockStore {
 public:
  BlockStore(uint32_t block_size, uint64_t block_count, uint64_t corrupt_seed = 1,
             uint64_t cipher_key = 0, EventLog* log = nullptr);

  static Result<BlockStore, StoreError> open_file(const std::string& path, uint32_t block_size,
                                                  EventLog* log = nullptr);
  Result<Unit, StoreError> save_file(const std::string& path) const;

  uint32_t block_size() const { return block_size_; }
  uint64_t block_count() const { return block_count_; }
  uint64_t size_bytes() const { return data_.size(); }
  StoreMode mode() const { return mode_; }
  uint64_t cipher_key() const { return cipher_key_; }

  // Brick is terminal: once dead the instance never serves again.
  Result<Unit, StoreError> set_mode(StoreMode mode);

  Result<Bytes, StoreError> read_blocks(uint64_t lba, uint32_t count) const;
  Result<Unit, StoreError> write_blocks(uint64_t lba, uint32_t count,
                                        std::span<const uint8_t> data);

  // Device-internal view of the stored bytes, unaffected by mode transforms.
  // This is what the controller's own filesystem awareness reads.
  std::span<const uint8_t> raw() const { return data_; }
  std::span<uint8_t> raw_mut() { return data_; }

  StoreImage snapshot() const;
  Result<Unit, StoreError> restore(const StoreImage& image);

  // Keyed per-block transform used by cipher mode, exposed for tests: a
  // bijection on block contents that is not its own inverse.
  static void cipher_transform(uint64_t key, uint64_t lba, std::span<uint8_t> block);
  static void cipher_inverse(uint64_t key, uint64_t lba, std::span<uint8_t> block);

 private:
  Result<Unit, StoreError> check_range(uint64_t lba, uint32_t count) const;
  void corrupt_in_place(uint64_t lba, std::span<uint8_t> data) const;

  uint32_t block_size_;
  uint64_t block_count_;
  StoreMode mode_ = StoreMode::kNormal;
  uint64_t corrupt_seed_;
  uint64_t cipher_key_;
  Bytes data_;
  EventLog* log_;
};

}  // namespace nvmesim::backend
