#pragma once

#include <cstdint>
#include <string_view>

namespace sdx {

// FNV-1a; stable across platforms, used for cookies and fingerprints.
constexpr uint32_t fnv1a32(std::string_view data) noexcept {
  uint32_t h = 0x811c9dc5u;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x01000193u;
  }
  return h;
}

constexpr uint64_t fnv1a64(std::string_view data) noexcept {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace sdx
