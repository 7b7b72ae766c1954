#include "sdx/rules/flow_table.h"

#include <algorithm>
#include <tuple>

#include "sdx/common/hash.h"

namespace sdx::rules {

std::string_view cookie_kind_name(CookieKind kind) {
  switch (kind) {
    case CookieKind::kAclAllow: return "acl-allow";
    case CookieKind::kAclDrop: return "acl-drop";
    case CookieKind::kAclRedirect: return "acl-redirect";
    case CookieKind::kCatchAll: return "catch-all";
    case CookieKind::kVlan: return "vlan";
    case CookieKind::kL2Miss: return "l2-miss";
    case CookieKind::kL2Learned: return "l2-learned";
  }
  return "unknown";
}

uint64_t encode_cookie(CookieKind kind, std::string_view name, uint16_t index) {
  const uint32_t hash = name.empty() ? 0 : fnv1a32(name);
  return kCookieMarker << 56 | static_cast<uint64_t>(kind) << 48 | static_cast<uint64_t>(hash) << 16 |
         index;
}

std::optional<CookieInfo> decode_cookie(uint64_t cookie) {
  if (cookie >> 56 != kCookieMarker) return std::nullopt;
  const auto kind = static_cast<uint8_t>(cookie >> 48);
  if (kind < static_cast<uint8_t>(CookieKind::kAclAllow) ||
      kind > static_cast<uint8_t>(CookieKind::kL2Learned)) {
    return std::nullopt;
  }
  return CookieInfo{static_cast<CookieKind>(kind), static_cast<uint32_t>(cookie >> 16),
                    static_cast<uint16_t>(cookie)};
}

std::string FlowEntry::actions_string() const {
  if (is_drop()) return "drop";
  std::string out;
  for (uint32_t port : outputs) {
    if (!out.empty()) out += ',';
    out += "output:";
    out += port == of::port::kController ? "CONTROLLER" : std::to_string(port);
  }
  if (goto_table) {
    if (!out.empty()) out += ',';
    out += "goto:" + std::to_string(*goto_table);
  }
  return out;
}

std::string FlowEntry::to_string() const {
  std::string out = "table=" + std::to_string(table_id) + " prio=" + std::to_string(priority) +
                    " " + match.to_string() + " -> " + actions_string();
  if (idle_timeout != 0) out += " idle_timeout=" + std::to_string(idle_timeout);
  return out;
}

bool entry_order(const FlowEntry& a, const FlowEntry& b) {
  return std::tie(a.table_id, b.priority, a.match) < std::tie(b.table_id, a.priority, b.match);
}

of::FlowMod to_flow_mod(const FlowEntry& entry, of::FlowModCommand command) {
  of::FlowMod fm;
  fm.cookie = entry.cookie;
  fm.table_id = entry.table_id;
  fm.command = command;
  fm.priority = entry.priority;
  fm.idle_timeout = entry.idle_timeout;
  fm.match = entry.match;
  if (command == of::FlowModCommand::kDelete || command == of::FlowModCommand::kDeleteStrict) {
    return fm;
  }
  if (!entry.outputs.empty()) {
    of::ApplyActions apply;
    for (uint32_t port : entry.outputs) {
      apply.actions.push_back(
          {port, port == of::port::kController ? of::kControllerMaxLenNoBuffer : uint16_t{0}});
    }
    fm.instructions.emplace_back(std::move(apply));
  }
  if (entry.goto_table) fm.instructions.emplace_back(of::GotoTable{*entry.goto_table});
  return fm;
}

FlowEntry entry_from_instructions(uint8_t table_id, uint16_t priority, const of::Match& match,
                                  const std::vector<of::Instruction>& instructions,
                                  uint64_t cookie, uint16_t idle_timeout) {
  FlowEntry e;
  e.table_id = table_id;
  e.priority = priority;
  e.match = match;
  e.cookie = cookie;
  e.idle_timeout = idle_timeout;
  bool seen_apply = false;
  for (const auto& ins : instructions) {
    if (e.goto_table) throw UnsupportedEntry("instruction after goto_table");
    if (const auto* apply = std::get_if<of::ApplyActions>(&ins)) {
      if (seen_apply) throw UnsupportedEntry("more than one apply_actions");
      seen_apply = true;
      for (const auto& a : apply->actions) e.outputs.push_back(a.port);
    } else {
      e.goto_table = std::get<of::GotoTable>(ins).table_id;
    }
  }
  return e;
}

void FlowTable::sort() { std::sort(entries.begin(), entries.end(), entry_order); }

std::vector<const FlowEntry*> FlowTable::table(uint8_t table_id) const {
  std::vector<const FlowEntry*> out;
  for (const auto& e : entries) {
    if (e.table_id == table_id) out.push_back(&e);
  }
  return out;
}

std::string FlowTable::dump() const {
  std::vector<const FlowEntry*> sorted;
  for (const auto& e : entries) sorted.push_back(&e);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const FlowEntry* a, const FlowEntry* b) { return entry_order(*a, *b); });
  std::string out;
  for (const auto* e : sorted) {
    out += e->to_string();
    out += '\n';
  }
  return out;
}

}  // namespace sdx::rules
