#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sdx/common/clock.h"
#include "sdx/controller/controller.h"
#include "sdx/stats/store.h"

namespace sdx::stats {

struct PollerOptions {
  int64_t interval_ms = 15000;
};

struct CycleReport {
  int64_t t_ms = 0;
  size_t targets = 0;
  size_t succeeded = 0;
  size_t samples = 0;
  std::vector<double> durations_s;
};

// Sends one PORT_STATS request per configured datapath per cycle and files
// the replies, stamped with the injected clock, into the store.
class StatsPoller {
 public:
  StatsPoller(controller::Controller& ctl, StatsStore& store, std::shared_ptr<Clock> clock,
              PollerOptions options = {});
  ~StatsPoller();
  StatsPoller(const StatsPoller&) = delete;
  StatsPoller& operator=(const StatsPoller&) = delete;

  CycleReport poll_once();
  // Runs a cycle when the clock has reached the next due time. The first
  // call is always due; later ones fall on multiples of the interval.
  std::optional<CycleReport> poll_if_due();

  // Background loop: a cycle whenever the clock reaches the next due time,
  // checked at least every 200 ms of real time.
  void start();
  void stop();
  bool running() const { return running_; }
  // Clock time the loop last ran; -1 before it first does.
  int64_t last_heartbeat_ms() const { return heartbeat_ms_; }
  int64_t interval_ms() const { return options_.interval_ms; }
  uint64_t cycles() const { return cycles_; }

 private:
  void loop();

  controller::Controller& ctl_;
  StatsStore& store_;
  std::shared_ptr<Clock> clock_;
  PollerOptions options_;
  std::mutex poll_mu_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::atomic<bool> running_{false};
  std::atomic<int64_t> heartbeat_ms_{-1};
  std::atomic<uint64_t> cycles_{0};
  std::thread thread_;
  std::optional<int64_t> next_due_ms_;
};

}  // namespace sdx::stats
