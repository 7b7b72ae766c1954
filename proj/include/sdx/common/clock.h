#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>

namespace sdx {

// Millisecond time source. Production code reads the steady clock; tests and
// the simulator drive a ManualClock so timing laws are exact.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual int64_t now_ms() const = 0;
};

class SteadyClock final : public Clock {
 public:
  int64_t now_ms() const override {
    using namespace std::chrono;
    return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
  }
};

class ManualClock final : public Clock {
 public:
  explicit ManualClock(int64_t start_ms = 0) : now_(start_ms) {}

  int64_t now_ms() const override { return now_.load(std::memory_order_acquire); }
  void set(int64_t t) { now_.store(t, std::memory_order_release); }
  void advance(int64_t delta) { now_.fetch_add(delta, std::memory_order_acq_rel); }

 private:
  std::atomic<int64_t> now_;
};

inline std::shared_ptr<Clock> steady_clock() { return std::make_shared<SteadyClock>(); }

}  // namespace sdx
