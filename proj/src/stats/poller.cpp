#include "sdx/stats/poller.h"

#include <spdlog/spdlog.h>

#include <chrono>

namespace sdx::stats {

StatsPoller::StatsPoller(controller::Controller& ctl, StatsStore& store, std::shared_ptr<Clock> clock,
                         PollerOptions options)
    : ctl_(ctl), store_(store), clock_(std::move(clock)), options_(options) {}

StatsPoller::~StatsPoller() { stop(); }

CycleReport StatsPoller::poll_once() {
  std::lock_guard lock(poll_mu_);
  CycleReport report;
  report.t_ms = clock_->now_ms();
  const auto cfg = ctl_.active_config();
  for (const auto& [name, dp] : cfg->dps) {
    ++report.targets;
    const auto start = std::chrono::steady_clock::now();
    auto entries = ctl_.port_stats(dp.dp_id);
    const double duration = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const int64_t t = clock_->now_ms();
    if (entries) {
      ++report.succeeded;
      for (const auto& e : *entries) report.samples += store_.append(name, e, t);
    }
    store_.record_scrape(name, duration, entries.has_value(), t);
    report.durations_s.push_back(duration);
  }
  ++cycles_;
  return report;
}

std::optional<CycleReport> StatsPoller::poll_if_due() {
  {
    std::lock_guard lock(mu_);
    const int64_t now = clock_->now_ms();
    if (next_due_ms_ && now < *next_due_ms_) return std::nullopt;
    next_due_ms_ = next_due_ms_ ? *next_due_ms_ + options_.interval_ms * ((now - *next_due_ms_) / options_.interval_ms + 1)
                                : now + options_.interval_ms;
  }
  return poll_once();
}

void StatsPoller::start() {
  if (running_.exchange(true)) return;
  thread_ = std::thread([this] { loop(); });
}

void StatsPoller::stop() {
  {
    std::lock_guard lock(mu_);
    if (!running_.exchange(false)) return;
  }
  cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

void StatsPoller::loop() {
  std::unique_lock lock(mu_);
  while (running_) {
    lock.unlock();
    heartbeat_ms_ = clock_->now_ms();
    try {
      poll_if_due();
    } catch (const std::exception& e) {
      spdlog::error("stats poll failed: {}", e.what());
    }
    heartbeat_ms_ = clock_->now_ms();
    lock.lock();
    cv_.wait_for(lock, std::chrono::milliseconds(200), [this] { return !running_; });
  }
}

}  // namespace sdx::stats
