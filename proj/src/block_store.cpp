// Copyright 2026 the nvmesim authors
// SPDX-License-Identifier: Apache-2.0

#include "nvmesim/block_store.hpp"

#include <cstdio>

namespace nvmesim::backend {

const char* to_string(StoreMode mode) {
  switch (mode) {
    case StoreMode::kNormal:
      return "normal";
    case StoreMode::kCorrupt:
      return "corrupt";
    case StoreMode::kBrick:
      return "brick";
    case StoreMode::kCipher:
      return "cipher";
  }
  return "?";
}

BlockStore::BlockStore(uint32_t block_size, uint64_t block_count, uint64_t corrupt_seed,
                       uint64_t cipher_key, EventLog* log)
    : block_size_(block_size),
      block_count_(block_count),
      corrupt_seed_(corrupt_seed),
      cipher_key_(cipher_key),
      data_(block_size * block_count, 0),
      log_(log) {}

Result<BlockStore, StoreError> BlockStore::open_file(const std::string& path, uint32_t block_size,
                                                     EventLog* log) {
  FILE* f = fopen(path.c_str(), "rb");
  if (!f) return Result<BlockStore, StoreError>::error(StoreError::kIoError, "open " + path);
  fseek(f, 0, SEEK_END);
  long len = ftell(f);
  fseek(f, 0, SEEK_SET);
  if (len < 0 || len % block_size != 0) {
    fclose(f);
    return Result<BlockStore, StoreError>::error(StoreError::kIoError,
                                                 "image size not a block multiple");
  }
  BlockStore store(block_size, static_cast<uint64_t>(len) / block_size, 1, 0, log);
  size_t got = fread(store.data_.data(), 1, store.data_.size(), f);
  fclose(f);
  if (got != store.data_.size()) {
    return Result<BlockStore, StoreError>::error(StoreError::kIoError, "short read");
  }
  return store;
}

Result<Unit, StoreError> BlockStore::save_file(const std::string& path) const {
  FILE* f = fopen(path.c_str(), "wb");
  if (!f) return Result<Unit, StoreError>::error(StoreError::kIoError, "open " + path);
  size_t put = fwrite(data_.data(), 1, data_.size(), f);
  fclose(f);
  if (put != data_.size()) {
    return Result<Unit, StoreError>::error(StoreError::kIoError, "short write");
  }
  return Unit{};
}

Result<Unit, StoreError> BlockStore::set_mode(StoreMode mode) {
  if (mode_ == StoreMode::kBrick && mode != StoreMode::kBrick) {
    return Result<Unit, StoreError>::error(StoreError::kModeLocked, "brick is one-way");
  }
  mode_ = mode;
  if (log_) log_->emit("backend", "mode-change", {{"mode", to_string(mode_)}});
  return Unit{};
}

Result<Unit, StoreError> BlockStore::check_range(uint64_t lba, uint32_t count) const {
  if (lba + count < lba || lba + count > block_count_) {
    return Result<Unit, StoreError>::error(StoreError::kRangeError, "lba range overflow");
  }
  return Unit{};
}

Result<Bytes, StoreError> BlockStore::read_blocks(uint64_t lba, uint32_t count) const {
  if (mode_ == StoreMode::kBrick) {
    return Result<Bytes, StoreError>::error(StoreError::kDeviceDead, "bricked");
  }
  if (auto r = check_range(lba, count); !r) {
    return Result<Bytes, StoreError>::error(r.error_code(), r.error_detail());
  }
  Bytes out(data_.begin() + lba * block_size_, data_.begin() + (lba + count) * block_size_);
  switch (mode_) {
    case StoreMode::kNormal:
      break;
    case StoreMode::kCorrupt:
      corrupt_in_place(lba, out);
      break;
    case StoreMode::kCipher:
      for (uint32_t i = 0; i < count; i++) {
        cipher_transform(cipher_key_, lba + i,
                         std::span<uint8_t>(out).subspan(i * block_size_, block_size_));
      }
      break;
    case StoreMode::kBrick:
      break;  // unreachable
  }
  return out;
}

Result<Unit, StoreError> BlockStore::write_blocks(uint64_t lba, uint32_t count,
                                                  std::span<const uint8_t> data) {
  if (mode_ == StoreMode::kBrick) {
    return Result<Unit, StoreError>::error(StoreError::kDeviceDead, "bricked");
  }
  if (auto r = check_range(lba, count); !r) return r;
  if (data.size() != static_cast<size_t>(count) * block_size_) {
    return Result<Unit, StoreError>::error(StoreError::kRangeError, "payload size mismatch");
  }
  uint8_t* dst = data_.data() + lba * block_size_;
  std::memcpy(dst, data.data(), data.size());
  if (mode_ == StoreMode::kCipher) {
    for (uint32_t i = 0; i < count; i++) {
      cipher_transform(cipher_key_, lba + i,
                       std::span<uint8_t>(dst + i * block_size_, block_size_));
    }
  }
  return Unit{};
}

// One bit flipped per 64-byte chunk, position derived from (seed, chunk index):
// visibly wrong data, deterministically reproducible, not total destruction.
void BlockStore::corrupt_in_place(uint64_t lba, std::span<uint8_t> data) const {
  uint64_t base_chunk = lba * block_size_ / 64;
  for (size_t off = 0; off + 64 <= data.size(); off += 64) {
    uint64_t x = corrupt_seed_ ^ (base_chunk + off / 64);
    uint64_t bit = Rng::splitmix64(x) % 512;
    data[off + bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
  }
}

namespace {

// Byte substitution: multiply by an odd constant mod 256. Bijective and,
// composed with itself, not the identity, so the block transform is not an
// involution: ciphering an already-ciphered block does not decipher it.
constexpr uint8_t kSboxMul = 167;

uint8_t sbox(uint8_t x) { return static_cast<uint8_t>(x * kSboxMul + 0x5a); }

uint8_t sbox_inv(uint8_t y) {
  // 23 * 167 = 3841 = 15*256 + 1, so 23 is the multiplicative inverse of 167.
  return static_cast<uint8_t>((y - 0x5a) * 23);
}

}  // namespace

void BlockStore::cipher_transform(uint64_t key, uint64_t lba, std::span<uint8_t> block) {
  uint64_t x = key ^ (lba * 0x9e3779b97f4a7c15ULL) ^ 0x632a9d6f01c3b7e5ULL;
  size_t i = 0;
  while (i < block.size()) {
    uint64_t ks = Rng::splitmix64(x);
    for (int b = 0; b < 8 && i < block.size(); b++, i++) {
      block[i] = sbox(block[i] ^ static_cast<uint8_t>(ks >> (b * 8)));
    }
  }
}

void BlockStore::cipher_inverse(uint64_t key, uint64_t lba, std::span<uint8_t> block) {
  uint64_t x = key ^ (lba * 0x9e3779b97f4a7c15ULL) ^ 0x632a9d6f01c3b7e5ULL;
  size_t i = 0;
  while (i < block.size()) {
    uint64_t ks = Rng::splitmix64(x);
    for (int b = 0; b < 8 && i < block.size(); b++, i++) {
      block[i] = sbox_inv(block[i]) ^ static_cast<uint8_t>(ks >> (b * 8));
    }
  }
}

StoreImage BlockStore::snapshot() const { return StoreImage{block_size_, block_count_, data_}; }

Result<Unit, StoreError> BlockStore::restore(const StoreImage& image) {
  if (image.block_size != block_size_ || image.block_count != block_count_ ||
      image.data.size() != data_.size()) {
    return Result<Unit, StoreError>::error(StoreError::kCapacityMismatch, "foreign image");
  }
  data_ = image.data;
  return Unit{};
}

}  // namespace nvmesim::backend
