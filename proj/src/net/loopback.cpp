#include "sdx/net/transport.h"

namespace sdx::net {

struct LoopbackLink::Shared {
  std::mutex mu;
  std::weak_ptr<ByteSink> sink_a;
  std::weak_ptr<ByteSink> sink_b;
  std::atomic<bool> closed{false};
};

class LoopbackLink::End : public Transport {
 public:
  End(std::shared_ptr<Shared> shared, bool is_a, std::string name)
      : shared_(std::move(shared)), is_a_(is_a), name_(std::move(name)) {}

  bool send(std::vector<uint8_t> bytes) override {
    if (shared_->closed) return false;
    auto sink = peer_sink();
    if (!sink) return false;
    sink->on_bytes(bytes);
    return true;
  }

  void close() override {
    if (shared_->closed.exchange(true)) return;
    std::shared_ptr<ByteSink> a, b;
    {
      std::lock_guard lock(shared_->mu);
      a = shared_->sink_a.lock();
      b = shared_->sink_b.lock();
    }
    if (a) a->on_close();
    if (b) b->on_close();
  }

  bool closed() const override { return shared_->closed; }
  std::string describe() const override { return "loopback:" + name_; }

 private:
  std::shared_ptr<ByteSink> peer_sink() {
    std::lock_guard lock(shared_->mu);
    return is_a_ ? shared_->sink_b.lock() : shared_->sink_a.lock();
  }

  std::shared_ptr<Shared> shared_;
  bool is_a_;
  std::string name_;
};

LoopbackLink::LoopbackLink(std::string name_a, std::string name_b)
    : shared_(std::make_shared<Shared>()),
      a_(std::make_shared<End>(shared_, true, std::move(name_a))),
      b_(std::make_shared<End>(shared_, false, std::move(name_b))) {}

void LoopbackLink::bind_a(std::weak_ptr<ByteSink> sink) {
  std::lock_guard lock(shared_->mu);
  shared_->sink_a = std::move(sink);
}

void LoopbackLink::bind_b(std::weak_ptr<ByteSink> sink) {
  std::lock_guard lock(shared_->mu);
  shared_->sink_b = std::move(sink);
}

}  // namespace sdx::net
