#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace sdx::of {

// Raised when a header declares a length below the 8-byte header size. The
// stream cannot be resynchronized, so the connection must be torn down.
class FramingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reassembles length-prefixed OpenFlow frames from arbitrary read chunks.
// Single owner per connection.
class FrameAssembler {
 public:
  // Appends data and returns every frame completed by it, in order.
  std::vector<std::vector<uint8_t>> feed(std::span<const uint8_t> data);

  std::span<const uint8_t> residual() const { return buffer_; }
  bool failed() const { return failed_; }

 private:
  std::vector<uint8_t> buffer_;
  bool failed_ = false;
};

}  // namespace sdx::of
