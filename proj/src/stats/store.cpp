#include "sdx/stats/store.h"

#include <cmath>

namespace sdx::stats {

std::string_view counter_name(Counter c) {
  switch (c) {
    case Counter::kRxPackets: return "rx_packets";
    case Counter::kTxPackets: return "tx_packets";
    case Counter::kRxBytes: return "rx_bytes";
    case Counter::kTxBytes: return "tx_bytes";
    case Counter::kRxDropped: return "rx_dropped";
    case Counter::kTxDropped: return "tx_dropped";
    case Counter::kRxErrors: return "rx_errors";
    case Counter::kTxErrors: return "tx_errors";
  }
  return "?";
}

uint64_t counter_value(const of::PortStatsEntry& e, Counter c) {
  switch (c) {
    case Counter::kRxPackets: return e.rx_packets;
    case Counter::kTxPackets: return e.tx_packets;
    case Counter::kRxBytes: return e.rx_bytes;
    case Counter::kTxBytes: return e.tx_bytes;
    case Counter::kRxDropped: return e.rx_dropped;
    case Counter::kTxDropped: return e.tx_dropped;
    case Counter::kRxErrors: return e.rx_errors;
    case Counter::kTxErrors: return e.tx_errors;
  }
  return 0;
}

Series::Series(size_t capacity) : ring_(std::max<size_t>(capacity, 2)) {}

bool Series::append(int64_t t_ms, double value) {
  const auto prev = last();
  if (prev && t_ms <= prev->t_ms) return false;
  const bool reset = prev && value < prev->value;
  const size_t slot = (head_ + size_) % ring_.size();
  ring_[slot] = Sample{t_ms, value, reset};
  if (size_ < ring_.size()) {
    ++size_;
  } else {
    head_ = (head_ + 1) % ring_.size();
  }
  return true;
}

std::vector<Sample> Series::samples() const {
  std::vector<Sample> out;
  out.reserve(size_);
  for (size_t i = 0; i < size_; ++i) out.push_back(ring_[(head_ + i) % ring_.size()]);
  return out;
}

std::optional<Sample> Series::last() const {
  if (size_ == 0) return std::nullopt;
  return ring_[(head_ + size_ - 1) % ring_.size()];
}

size_t StatsStore::append(const std::string& dp, const of::PortStatsEntry& entry, int64_t t_ms) {
  std::lock_guard lock(mu_);
  auto it = series_.find(PortKey{dp, entry.port_no});
  if (it == series_.end()) {
    std::array<Series, kCountersPerPort> fresh{Series(capacity_), Series(capacity_), Series(capacity_),
                                               Series(capacity_), Series(capacity_), Series(capacity_),
                                               Series(capacity_), Series(capacity_)};
    it = series_.emplace(PortKey{dp, entry.port_no}, std::move(fresh)).first;
  }
  size_t kept = 0;
  for (size_t i = 0; i < kCountersPerPort; ++i) {
    if (it->second[i].append(t_ms, static_cast<double>(counter_value(entry, kAllCounters[i])))) ++kept;
  }
  appended_ += kept;
  if (kept > 0 && (!latest_ms_ || t_ms > *latest_ms_)) latest_ms_ = t_ms;
  return kept;
}

void StatsStore::record_scrape(const std::string& dp, double duration_s, bool success, int64_t t_ms) {
  std::lock_guard lock(mu_);
  auto& m = scrapes_[dp];
  m.duration_s = std::max(duration_s, 0.0);
  m.last_success = success;
  m.last_attempt_ms = t_ms;
  ++m.attempts;
  if (!success) ++m.failures;
}

std::vector<PortKey> StatsStore::ports() const {
  std::lock_guard lock(mu_);
  std::vector<PortKey> out;
  for (const auto& [k, v] : series_) out.push_back(k);
  return out;
}

std::vector<PortKey> StatsStore::ports(const std::string& dp) const {
  std::lock_guard lock(mu_);
  std::vector<PortKey> out;
  for (const auto& [k, v] : series_) {
    if (k.dp == dp) out.push_back(k);
  }
  return out;
}

std::vector<Sample> StatsStore::series(const PortKey& key, Counter c) const {
  std::lock_guard lock(mu_);
  auto it = series_.find(key);
  if (it == series_.end()) return {};
  return it->second[static_cast<size_t>(c)].samples();
}

std::map<std::string, ScrapeMeta> StatsStore::scrape_meta() const {
  std::lock_guard lock(mu_);
  return scrapes_;
}

uint64_t StatsStore::samples_appended() const {
  std::lock_guard lock(mu_);
  return appended_;
}

std::optional<int64_t> StatsStore::latest_sample_ms() const {
  std::lock_guard lock(mu_);
  return latest_ms_;
}

size_t StatsStore::series_count() const {
  std::lock_guard lock(mu_);
  return series_.size() * kCountersPerPort;
}

std::optional<double> compute_rate(const std::vector<Sample>& samples, double window_s, int64_t now_ms) {
  const double start = static_cast<double>(now_ms) - window_s * 1000.0;
  size_t first = samples.size();
  size_t end = samples.size();
  for (size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].t_ms > now_ms) {
      end = i;
      break;
    }
    if (first == samples.size() && static_cast<double>(samples[i].t_ms) >= start) first = i;
  }
  if (first >= end) return std::nullopt;
  size_t anchor = first;
  for (size_t i = first + 1; i < end; ++i) {
    if (samples[i].reset) anchor = i;
  }
  const size_t last = end - 1;
  if (last <= anchor) return std::nullopt;
  const double dt = static_cast<double>(samples[last].t_ms - samples[anchor].t_ms) / 1000.0;
  return (samples[last].value - samples[anchor].value) / dt;
}

RateSample compute_rates(const StatsStore& store, const PortKey& key, double window_s, int64_t now_ms) {
  auto rate = [&](Counter c, double scale) -> std::optional<double> {
    auto r = compute_rate(store.series(key, c), window_s, now_ms);
    if (r) *r *= scale;
    return r;
  };
  RateSample out;
  out.window_s = window_s;
  out.bits_in_per_sec = rate(Counter::kRxBytes, 8);
  out.bits_out_per_sec = rate(Counter::kTxBytes, 8);
  out.pkts_in_per_sec = rate(Counter::kRxPackets, 1);
  out.pkts_out_per_sec = rate(Counter::kTxPackets, 1);
  out.drops_in_per_sec = rate(Counter::kRxDropped, 1);
  out.drops_out_per_sec = rate(Counter::kTxDropped, 1);
  out.errors_in_per_sec = rate(Counter::kRxErrors, 1);
  out.errors_out_per_sec = rate(Counter::kTxErrors, 1);
  return out;
}

}  // namespace sdx::stats
