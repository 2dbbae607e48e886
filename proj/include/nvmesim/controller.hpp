// Copyright 2026 the nvmesim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "nvmesim/block_store.hpp"
#include "nvmesim/common.hpp"
#include "nvmesim/host_memory.hpp"
#include "nvmesim/nvme_types.hpp"

namespace nvmesim::dev {

enum class SpoofPolicy { kNone, kNeverReady };

struct ControllerConfig {
  std::string device_id = "nvme0";
  std::string model = "DESKSIM VIRTUAL NVME";
  std::string serial = "DS0000000001";
  std::array<uint8_t, 3> class_code = {0x01, 0x08, 0x02};  // NVM Express IO controller
  SpoofPolicy spoof = SpoofPolicy::kNone;
  uint64_t ready_latency_us = 0;
  uint64_t shutdown_budget_us = 2'000'000;
  uint16_t max_io_queues = 8;
  uint16_t max_queue_entries = 1024;
  uint32_t page_size = 4096;
};

// Budget-metered execution context handed to shutdown-window hooks. Sleeping
// past the deadline aborts the hook run; the shutdown itself still completes.
class WindowExpired {};

class ShutdownWindow {
 public:
  ShutdownWindow(SimClock& clock, uint64_t deadline_us) : clock_(clock), deadline_us_(deadline_us) {}

  void sleep_us(uint64_t us) {
    clock_.advance_us(us);
    if (clock_.now_us() > deadline_us_) {
      overrun_ = true;
      throw WindowExpired{};
    }
  }
  uint64_t deadline_us() const { return deadline_us_; }
  bool overrun() const { return overrun_; }

 private:
  SimClock& clock_;
  uint64_t deadline_us_;
  bool overrun_ = false;
};

// Adversarial taps on the IO path. The default implementation is a clean
// device; the malice engine overrides these.
class DeviceTaps {
 public:
  virtual ~DeviceTaps() = default;
  // Write-path data, in submission order, after PRP gather.
  virtual void on_write_stream(uint64_t lba, std::span<const uint8_t> data) {
    (void)lba;
    (void)data;
  }
  // Read-path observation (boot-pattern detection input).
  virtual void on_read_observed(uint64_t lba, uint32_t count) {
    (void)lba;
    (void)count;
  }
  // Read-path substitution; mutates the buffer that will reach the host.
  virtual void apply_read_shadow(uint64_t lba, uint32_t count, std::span<uint8_t> data) {
    (void)lba;
    (void)count;
    (void)data;
  }
  virtual void run_shutdown_hooks(ShutdownWindow& window) { (void)window; }
};

// Byte-accurate NVMe controller model: MMIO register file, admin and IO
// queue processing, PRP-based DMA through the host, completion posting with
// phase tags, and the controlled-shutdown state machine.
class NvmeController {
 public:
  NvmeController(ControllerConfig cfg, SimClock& clock, EventLog& log, hostsim::DmaEngine& dma,
                 backend::BlockStore& store, DeviceTaps* taps = nullptr);

  // MMIO register surface. Reads return the current register image (or 0 on
  // access errors, which are logged); writes may trigger controller init,
  // shutdown, or queue processing.
  uint64_t mmio_read(uint64_t offset, uint32_t size);
  void mmio_write(uint64_t offset, uint64_t value, uint32_t size);

  const ControllerConfig& config() const { return cfg_; }
  bool ready() const { return (csts_ & kCstsReady) != 0; }
  uint32_t csts() const { return csts_; }
  ShutdownStatus shutdown_status() const {
    return static_cast<ShutdownStatus>((csts_ & kCstsShstMask) >> kCstsShstShift);
  }
  uint64_t completions_posted() const { return completions_posted_; }
  uint64_t namespace_blocks() const { return store_.block_count(); }

  void set_taps(DeviceTaps* taps) { taps_ = taps ? taps : &null_taps_; }
  void set_irq_sink(std::function<void(uint16_t)> sink) { irq_sink_ = std::move(sink); }

 private:
  struct Cq {
    uint16_t qid = 0;
    uint64_t base = 0;
    uint16_t size = 0;
    uint16_t tail = 0;
    uint16_t head_db = 0;
    uint8_t phase = 1;
    uint64_t posted = 0;
  };
  struct Sq {
    uint16_t qid = 0;
    uint64_t base = 0;
    uint16_t size = 0;
    uint16_t head = 0;
    uint16_t tail_shadow = 0;
    uint16_t cqid = 0;
  };

  void access_error(uint64_t offset, uint32_t size, const char* why, bool is_read);
  void maybe_become_ready();
  void handle_cc_write(uint32_t value);
  void controller_enable();
  void controller_reset();
  void run_shutdown_sequence(uint32_t shn);

  void ring_sq_doorbell(uint16_t qid, uint32_t value);
  void ring_cq_doorbell(uint16_t qid, uint32_t value);
  void process_queue(Sq& sq);
  std::optional<SubmissionEntry> fetch_submission(Sq& sq);
  CompletionEntry make_cqe(const Sq& sq, uint16_t cid, uint16_t status, uint32_t result = 0) const;
  void post_completion(uint16_t cqid, CompletionEntry cqe);

  std::optional<CompletionEntry> execute_admin(Sq& sq, const SubmissionEntry& e);
  std::optional<CompletionEntry> execute_io(Sq& sq, const SubmissionEntry& e);
  uint16_t admin_identify(const SubmissionEntry& e);
  uint16_t admin_create_cq(const SubmissionEntry& e);
  uint16_t admin_create_sq(const SubmissionEntry& e);
  uint16_t admin_delete_queue(const SubmissionEntry& e, bool is_cq);
  uint16_t admin_features(const SubmissionEntry& e, bool set, uint32_t* result);
  uint16_t admin_get_log_page(const SubmissionEntry& e);

  // PRP walking. Returns the ordered (addr, len) segments of a transfer, or
  // nullopt on a malformed list / DMA fault while reading list pages.
  std::optional<std::vector<std::pair<uint64_t, uint64_t>>> prp_segments(uint64_t prp1,
                                                                         uint64_t prp2,
                                                                         uint64_t total);
  bool prp_read(uint64_t prp1, uint64_t prp2, std::span<uint8_t> out);
  bool prp_write(uint64_t prp1, uint64_t prp2, std::span<const uint8_t> data);

  ControllerConfig cfg_;
  SimClock& clock_;
  EventLog& log_;
  hostsim::DmaEngine& dma_;
  backend::BlockStore& store_;
  DeviceTaps null_taps_;
  DeviceTaps* taps_;
  std::function<void(uint16_t)> irq_sink_;

  uint64_t cap_ = 0;
  uint32_t cc_ = 0;
  uint32_t csts_ = 0;
  uint32_t aqa_ = 0;
  uint64_t asq_ = 0;
  uint64_t acq_ = 0;

  bool enabled_ = false;
  bool shutdown_done_ = false;
  uint64_t ready_at_us_ = 0;
  bool ready_pending_ = false;

  std::map<uint16_t, Sq> sqs_;
  std::map<uint16_t, Cq> cqs_;
  uint16_t io_queues_allocated_;
  uint64_t completions_posted_ = 0;
};

}  // namespace nvmesim::dev
