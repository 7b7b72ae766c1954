#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>

namespace sdx::stats {

struct ProcessStats {
  // CPU time over wall time since the previous sample, as a percentage of
  // one core.
  double cpu_percent = 0;
  uint64_t resident_bytes = 0;
  uint64_t virtual_bytes = 0;
};

// Reads /proc/self; the first call reports 0 % CPU.
class ProcessSampler {
 public:
  ProcessStats sample();

 private:
  std::mutex mu_;
  std::optional<std::pair<std::chrono::steady_clock::time_point, double>> prev_;
  double last_cpu_percent_ = 0;
};

}  // namespace sdx::stats
