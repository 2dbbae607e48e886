// Copyright 2026 the nvmesim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace nvmesim {

using json = nlohmann::json;
using Bytes = std::vector<uint8_t>;

// ---------------------------------------------------------------------------
// Result<T, E>: value-or-error return for operations with typed failure modes.
// ---------------------------------------------------------------------------

template <typename E>
struct Err {
  E code;
  std::string detail;
};

template <typename T, typename E>
class Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(Err<E> err) : v_(std::move(err)) {}
  static Result error(E code, std::string detail = {}) {
    return Result(Err<E>{code, std::move(detail)});
  }

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  T& value() & { return std::get<T>(v_); }
  const T& value() const& { return std::get<T>(v_); }
  T&& take() { return std::move(std::get<T>(v_)); }

  E error_code() const { return std::get<Err<E>>(v_).code; }
  const std::string& error_detail() const { return std::get<Err<E>>(v_).detail; }

 private:
  std::variant<T, Err<E>> v_;
};

struct Unit {};

// ---------------------------------------------------------------------------
// Simulated time. Purely logical; one tick = one microsecond.
// ---------------------------------------------------------------------------

class SimClock {
 public:
  uint64_t now_us() const { return now_us_; }
  void advance_us(uint64_t us) { now_us_ += us; }
  void advance_ms(uint64_t ms) { advance_us(ms * 1000); }

 private:
  uint64_t now_us_ = 0;
};

// ---------------------------------------------------------------------------
// Event log: the observable record of a run. JSON-lines, one event per line,
// fields {seq, actor, kind, detail}. Sequence numbers are the logical
// timestamps every scenario assertion is written against.
// ---------------------------------------------------------------------------

struct Event {
  uint64_t seq;
  std::string actor;
  std::string kind;
  json detail;

  json to_json() const {
    return json{{"seq", seq}, {"actor", actor}, {"kind", kind}, {"detail", detail}};
  }
};

class EventLog {
 public:
  uint64_t emit(std::string_view actor, std::string_view kind, json detail = json::object()) {
    uint64_t seq = next_seq_++;
    if (capture_) {
      events_.push_back(Event{seq, std::string(actor), std::string(kind), std::move(detail)});
    }
    return seq;
  }

  // Large property-test loops disable capture to keep memory flat.
  void set_capture(bool on) { capture_ = on; }
  bool capture() const { return capture_; }

  const std::vector<Event>& events() const { return events_; }
  void clear() { events_.clear(); }

  const Event* find_first(std::string_view kind) const {
    for (const auto& e : events_) {
      if (e.kind == kind) return &e;
    }
    return nullptr;
  }

  size_t count(std::string_view kind) const {
    size_t n = 0;
    for (const auto& e : events_) {
      if (e.kind == kind) n++;
    }
    return n;
  }

  std::string to_jsonl() const {
    std::string out;
    for (const auto& e : events_) {
      out += e.to_json().dump();
      out += '\n';
    }
    return out;
  }

 private:
  std::vector<Event> events_;
  uint64_t next_seq_ = 0;
  bool capture_ = true;
};

// ---------------------------------------------------------------------------
// Deterministic RNG: splitmix64 seeding + xoshiro256** stream. Self-contained
// so the same seed yields the same bytes on every platform and stdlib.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& s : s_) s = splitmix64(x);
  }

  uint64_t next() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, bound). bound = 0 is treated as 1.
  uint64_t below(uint64_t bound) {
    if (bound <= 1) return 0;
    // Multiply-shift; bias is negligible for simulation workloads.
    return static_cast<uint64_t>((static_cast<__uint128_t>(next()) * bound) >> 64);
  }

  uint64_t range(uint64_t lo, uint64_t hi_inclusive) {
    return lo + below(hi_inclusive - lo + 1);
  }

  bool chance(uint32_t numer, uint32_t denom) { return below(denom) < numer; }

  void fill(std::span<uint8_t> out) {
    size_t i = 0;
    while (i + 8 <= out.size()) {
      uint64_t v = next();
      std::memcpy(out.data() + i, &v, 8);
      i += 8;
    }
    if (i < out.size()) {
      uint64_t v = next();
      std::memcpy(out.data() + i, &v, out.size() - i);
    }
  }

  Bytes bytes(size_t n) {
    Bytes b(n);
    fill(b);
    return b;
  }

  static uint64_t splitmix64(uint64_t& x) {
    uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

// Derives a named sub-seed so independent components draw independent streams
// from one scenario seed.
inline uint64_t subseed(uint64_t seed, std::string_view name) {
  uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (char c : name) {
    h ^= static_cast<uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return Rng::splitmix64(h);
}

// ---------------------------------------------------------------------------
// FNV-1a 64: content fingerprint used in manifests, logs, and assertions.
// ---------------------------------------------------------------------------

inline uint64_t fnv1a64(std::span<const uint8_t> data, uint64_t h = 0xcbf29ce484222325ULL) {
  for (uint8_t b : data) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t fnv1a64(const Bytes& b) { return fnv1a64(std::span<const uint8_t>(b)); }

std::string to_hex(std::span<const uint8_t> data);
std::string hex64(uint64_t v);
// Parses hex with optional whitespace between byte pairs; nullopt on bad input.
std::optional<Bytes> from_hex(std::string_view hex);

}  // namespace nvmesim
