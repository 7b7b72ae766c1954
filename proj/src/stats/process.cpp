#include "sdx/stats/process.h"

#include <unistd.h>

#include <fstream>
#include <sstream>
#include <string>

namespace sdx::stats {

namespace {

// utime + stime in seconds, from /proc/self/stat fields 14 and 15.
double cpu_seconds() {
  std::ifstream in("/proc/self/stat");
  std::string line;
  if (!std::getline(in, line)) return 0;
  const auto close = line.rfind(')');
  if (close == std::string::npos) return 0;
  std::istringstream rest(line.substr(close + 2));
  std::string field;
  uint64_t utime = 0;
  uint64_t stime = 0;
  // Fields after the command name start at 3 (state).
  for (int i = 3; i <= 15 && rest >> field; ++i) {
    if (i == 14) utime = std::stoull(field);
    if (i == 15) stime = std::stoull(field);
  }
  return static_cast<double>(utime + stime) / static_cast<double>(::sysconf(_SC_CLK_TCK));
}

}  // namespace

ProcessStats ProcessSampler::sample() {
  ProcessStats out;
  const auto page = static_cast<uint64_t>(::sysconf(_SC_PAGESIZE));
  std::ifstream statm("/proc/self/statm");
  uint64_t size = 0;
  uint64_t resident = 0;
  if (statm >> size >> resident) {
    out.virtual_bytes = size * page;
    out.resident_bytes = resident * page;
  }
  const auto now = std::chrono::steady_clock::now();
  const double cpu = cpu_seconds();
  std::lock_guard lock(mu_);
  if (prev_) {
    const double wall = std::chrono::duration<double>(now - prev_->first).count();
    if (wall >= 0.05) {
      last_cpu_percent_ = std::max(0.0, (cpu - prev_->second) / wall * 100.0);
      prev_ = {now, cpu};
    }
  } else {
    prev_ = {now, cpu};
  }
  out.cpu_percent = last_cpu_percent_;
  return out;
}

}  // namespace sdx::stats
