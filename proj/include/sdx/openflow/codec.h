#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdx/openflow/messages.h"

namespace sdx::of {

class EncodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Serializes msg in network byte order; header.length is computed. Throws
// EncodeError when the result would not fit the 16-bit length field.
std::vector<uint8_t> encode(const Message& msg);

struct DecodeError {
  enum class Kind { kTruncated, kBadLength, kBadVersion, kUnknownType, kMalformed };

  Kind kind = Kind::kMalformed;
  std::string message;
  uint8_t version = 0;
  uint8_t msg_type = 0;
  uint32_t xid = 0;
  // The offending frame, for logging.
  std::vector<uint8_t> frame;
};

std::string_view decode_error_kind_name(DecodeError::Kind kind);

class DecodeResult {
 public:
  DecodeResult(Message msg) : msg_(std::move(msg)) {}
  DecodeResult(DecodeError err) : err_(std::move(err)) {}

  bool ok() const { return msg_.has_value(); }
  explicit operator bool() const { return ok(); }
  const Message& message() const { return *msg_; }
  Message& message() { return *msg_; }
  const DecodeError& error() const { return *err_; }

 private:
  std::optional<Message> msg_;
  std::optional<DecodeError> err_;
};

// Decodes the first frame in bytes. Total: every input yields a message or a
// structured error.
DecodeResult decode(std::span<const uint8_t> bytes);

}  // namespace sdx::of
