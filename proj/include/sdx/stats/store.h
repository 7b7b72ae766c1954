#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdx/openflow/messages.h"

namespace sdx::stats {

enum class Counter { kRxPackets, kTxPackets, kRxBytes, kTxBytes, kRxDropped, kTxDropped, kRxErrors, kTxErrors };

inline constexpr size_t kCountersPerPort = 8;
inline constexpr std::array<Counter, kCountersPerPort> kAllCounters = {
    Counter::kRxPackets, Counter::kTxPackets, Counter::kRxBytes,  Counter::kTxBytes,
    Counter::kRxDropped, Counter::kTxDropped, Counter::kRxErrors, Counter::kTxErrors};

std::string_view counter_name(Counter c);
uint64_t counter_value(const of::PortStatsEntry& e, Counter c);

// 4 h at 15 s resolution.
inline constexpr size_t kDefaultCapacity = 960;

struct Sample {
  int64_t t_ms = 0;
  double value = 0;
  // Set when the value went down relative to the previous sample.
  bool reset = false;
  bool operator==(const Sample&) const = default;
};

// Fixed-capacity ring of samples with strictly increasing timestamps.
class Series {
 public:
  explicit Series(size_t capacity = kDefaultCapacity);

  // Returns false (and stores nothing) unless t_ms is after the last sample.
  bool append(int64_t t_ms, double value);
  std::vector<Sample> samples() const;
  std::optional<Sample> last() const;
  size_t size() const { return size_; }
  size_t capacity() const { return ring_.size(); }

 private:
  std::vector<Sample> ring_;
  size_t head_ = 0;
  size_t size_ = 0;
};

struct PortKey {
  std::string dp;
  uint32_t port = 0;
  auto operator<=>(const PortKey&) const = default;
};

struct ScrapeMeta {
  double duration_s = 0;
  bool last_success = false;
  int64_t last_attempt_ms = 0;
  uint64_t attempts = 0;
  uint64_t failures = 0;
};

// Thread-safe; one writer (the poller), any number of readers.
class StatsStore {
 public:
  explicit StatsStore(size_t capacity = kDefaultCapacity) : capacity_(capacity) {}

  // Appends the 8 counters of one port; returns how many samples were kept.
  size_t append(const std::string& dp, const of::PortStatsEntry& entry, int64_t t_ms);
  void record_scrape(const std::string& dp, double duration_s, bool success, int64_t t_ms);

  std::vector<PortKey> ports() const;
  std::vector<PortKey> ports(const std::string& dp) const;
  std::vector<Sample> series(const PortKey& key, Counter c) const;
  std::map<std::string, ScrapeMeta> scrape_meta() const;
  uint64_t samples_appended() const;
  std::optional<int64_t> latest_sample_ms() const;
  size_t series_count() const;

 private:
  mutable std::mutex mu_;
  size_t capacity_;
  std::map<PortKey, std::array<Series, kCountersPerPort>> series_;
  std::map<std::string, ScrapeMeta> scrapes_;
  uint64_t appended_ = 0;
  std::optional<int64_t> latest_ms_;
};

// Per-second rate of one counter series over the window ending at now_ms.
// The window is re-anchored at the latest reset inside it; nullopt when
// fewer than two samples remain.
std::optional<double> compute_rate(const std::vector<Sample>& samples, double window_s, int64_t now_ms);

struct RateSample {
  std::optional<double> bits_in_per_sec;
  std::optional<double> bits_out_per_sec;
  std::optional<double> pkts_in_per_sec;
  std::optional<double> pkts_out_per_sec;
  std::optional<double> drops_in_per_sec;
  std::optional<double> drops_out_per_sec;
  std::optional<double> errors_in_per_sec;
  std::optional<double> errors_out_per_sec;
  double window_s = 0;
};

inline constexpr double kDefaultRateWindowS = 60;

RateSample compute_rates(const StatsStore& store, const PortKey& key, double window_s, int64_t now_ms);

}  // namespace sdx::stats
