#include "sdx/openflow/framing.h"

#include <string>

#include "sdx/openflow/messages.h"

namespace sdx::of {

std::vector<std::vector<uint8_t>> FrameAssembler::feed(std::span<const uint8_t> data) {
  if (failed_) throw FramingError("stream already failed");
  buffer_.insert(buffer_.end(), data.begin(), data.end());
  std::vector<std::vector<uint8_t>> frames;
  size_t pos = 0;
  while (buffer_.size() - pos >= kHeaderSize) {
    const size_t length = static_cast<size_t>(buffer_[pos + 2]) << 8 | buffer_[pos + 3];
    if (length < kHeaderSize) {
      failed_ = true;
      buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(pos));
      throw FramingError("frame length " + std::to_string(length) + " below header size");
    }
    if (buffer_.size() - pos < length) break;
    const auto begin = buffer_.begin() + static_cast<std::ptrdiff_t>(pos);
    frames.emplace_back(begin, begin + static_cast<std::ptrdiff_t>(length));
    pos += length;
  }
  buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(pos));
  return frames;
}

}  // namespace sdx::of
