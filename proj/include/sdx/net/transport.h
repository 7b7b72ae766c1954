#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace sdx::net {

// Outbound half of a byte-stream connection.
class Transport {
 public:
  virtual ~Transport() = default;
  // Returns false when the connection is closed.
  virtual bool send(std::vector<uint8_t> bytes) = 0;
  virtual void close() = 0;
  virtual bool closed() const = 0;
  virtual std::string describe() const = 0;
};

// Inbound half: whoever owns a connection feeds received bytes here.
class ByteSink {
 public:
  virtual ~ByteSink() = default;
  virtual void on_bytes(std::span<const uint8_t> bytes) = 0;
  virtual void on_close() = 0;
};

// In-process connection. Bytes sent on one end are delivered synchronously,
// on the sending thread, to the sink bound to the other end.
class LoopbackLink {
 public:
  LoopbackLink(std::string name_a, std::string name_b);

  std::shared_ptr<Transport> a() const { return a_; }
  std::shared_ptr<Transport> b() const { return b_; }
  // Sink receiving what b sends.
  void bind_a(std::weak_ptr<ByteSink> sink);
  // Sink receiving what a sends.
  void bind_b(std::weak_ptr<ByteSink> sink);

 private:
  class End;
  struct Shared;
  std::shared_ptr<Shared> shared_;
  std::shared_ptr<Transport> a_;
  std::shared_ptr<Transport> b_;
};

}  // namespace sdx::net
