#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sdx/openflow/messages.h"

namespace sdx::rules {

enum class Table : uint8_t { kAcl = 0, kVlan = 1, kL2 = 2 };
constexpr uint8_t kNumTables = 3;

constexpr uint16_t kCatchAllPriority = 1;
constexpr uint16_t kAclBasePriority = 20000;
constexpr uint16_t kVlanPriority = 100;
constexpr uint16_t kL2MissPriority = 0;
constexpr uint16_t kL2LearnedPriority = 100;
constexpr uint16_t kL2IdleTimeout = 300;

// Cookie layout, high to low: 8-bit marker, 8-bit kind, 32-bit name hash,
// 16-bit index. Every entry we install carries the marker, so a masked
// DELETE on the marker removes exactly our entries.
constexpr uint64_t kCookieMarker = 0x5D;
constexpr uint64_t kCookieMarkerMask = 0xFFull << 56;

enum class CookieKind : uint8_t {
  kAclAllow = 1,
  kAclDrop = 2,
  kAclRedirect = 3,
  kCatchAll = 4,
  kVlan = 5,
  kL2Miss = 6,
  kL2Learned = 7,
};

std::string_view cookie_kind_name(CookieKind kind);

struct CookieInfo {
  CookieKind kind = CookieKind::kCatchAll;
  uint32_t name_hash = 0;
  uint16_t index = 0;
  bool operator==(const CookieInfo&) const = default;
};

uint64_t encode_cookie(CookieKind kind, std::string_view name, uint16_t index);
std::optional<CookieInfo> decode_cookie(uint64_t cookie);

struct FlowEntry {
  uint8_t table_id = 0;
  uint16_t priority = 0;
  of::Match match;
  // Applied in order, then goto_table if set. Both empty means drop.
  std::vector<uint32_t> outputs;
  std::optional<uint8_t> goto_table;
  uint64_t cookie = 0;
  uint16_t idle_timeout = 0;

  bool is_drop() const { return outputs.empty() && !goto_table; }
  std::string actions_string() const;
  // table=0 prio=19999 in_port=2,eth_type=0x0800,ip_proto=1 -> output:4
  std::string to_string() const;

  bool same_key(const FlowEntry& o) const {
    return table_id == o.table_id && priority == o.priority && match == o.match;
  }
  bool operator==(const FlowEntry&) const = default;
};

// Sort order: table ascending, priority descending, then match.
bool entry_order(const FlowEntry& a, const FlowEntry& b);

of::FlowMod to_flow_mod(const FlowEntry& entry, of::FlowModCommand command);

class UnsupportedEntry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inverse of to_flow_mod for entries of our shape: at most one ApplyActions
// (outputs only) followed by at most one GotoTable.
FlowEntry entry_from_instructions(uint8_t table_id, uint16_t priority, const of::Match& match,
                                  const std::vector<of::Instruction>& instructions,
                                  uint64_t cookie, uint16_t idle_timeout);

struct FlowTable {
  uint64_t dp_id = 0;
  std::string dp_name;
  uint64_t fingerprint = 0;
  std::vector<FlowEntry> entries;

  void sort();
  std::vector<const FlowEntry*> table(uint8_t table_id) const;
  // One line per entry, sorted, newline-terminated.
  std::string dump() const;
  bool same_entries(const FlowTable& other) const { return entries == other.entries; }
};

}  // namespace sdx::rules
