#include "sdx/sim/flow_tables.h"

#include <algorithm>

namespace sdx::sim {

namespace {

constexpr uint16_t kErrFlowModFailed = 5;
constexpr uint16_t kErrBadTableId = 9;
constexpr uint16_t kErrBadCommand = 8;

bool cookie_selects(const InstalledFlow& e, const of::FlowMod& fm) {
  return (e.cookie & fm.cookie_mask) == (fm.cookie & fm.cookie_mask);
}

bool table_selects(const InstalledFlow& e, const of::FlowMod& fm) {
  return fm.table_id == of::kAllTables || e.table_id == fm.table_id;
}

bool outputs_to(const InstalledFlow& e, uint32_t port) {
  if (port == of::port::kAny) return true;
  for (const auto& ins : e.instructions) {
    if (const auto* apply = std::get_if<of::ApplyActions>(&ins)) {
      for (const auto& a : apply->actions) {
        if (a.port == port) return true;
      }
    }
  }
  return false;
}

}  // namespace

bool match_applies(const of::Match& m, uint32_t in_port, const FrameHeader& h) {
  if (!m.extra.empty()) return false;
  if (m.in_port && *m.in_port != in_port) return false;
  if (m.eth_dst && *m.eth_dst != h.dst) return false;
  if (m.eth_src && *m.eth_src != h.src) return false;
  if (m.eth_type && *m.eth_type != h.eth_type) return false;
  // Frames are untagged; only OFPVID_NONE matches.
  if (m.vlan_vid && *m.vlan_vid != 0) return false;
  if (m.ip_proto && (!h.ip_proto || *m.ip_proto != *h.ip_proto)) return false;
  return true;
}

FlowModOutcome SimFlowTables::apply(const of::FlowMod& fm, int64_t now_ms) {
  FlowModOutcome out;
  auto fail = [&](uint16_t code) {
    out.ok = false;
    out.error_type = kErrFlowModFailed;
    out.error_code = code;
    return out;
  };
  const bool all_tables = fm.table_id == of::kAllTables;
  const bool deleting =
      fm.command == of::FlowModCommand::kDelete || fm.command == of::FlowModCommand::kDeleteStrict;
  if (!(fm.table_id < n_tables_ || (all_tables && deleting))) return fail(kErrBadTableId);

  auto strict_hit = [&](const InstalledFlow& e) {
    return e.table_id == fm.table_id && e.priority == fm.priority && e.match == fm.match;
  };

  switch (fm.command) {
    case of::FlowModCommand::kAdd: {
      auto it = std::find_if(entries_.begin(), entries_.end(), strict_hit);
      InstalledFlow fresh;
      fresh.table_id = fm.table_id;
      fresh.priority = fm.priority;
      fresh.match = fm.match;
      fresh.instructions = fm.instructions;
      fresh.cookie = fm.cookie;
      fresh.idle_timeout = fm.idle_timeout;
      fresh.hard_timeout = fm.hard_timeout;
      fresh.installed_ms = now_ms;
      fresh.last_used_ms = now_ms;
      if (it != entries_.end()) {
        fresh.seq = it->seq;
        *it = std::move(fresh);
        ++out.modified;
      } else {
        fresh.seq = next_seq_++;
        entries_.push_back(std::move(fresh));
        ++out.added;
      }
      return out;
    }
    case of::FlowModCommand::kModify:
    case of::FlowModCommand::kModifyStrict: {
      const bool strict = fm.command == of::FlowModCommand::kModifyStrict;
      for (auto& e : entries_) {
        const bool hit = strict ? strict_hit(e)
                                : (e.table_id == fm.table_id && fm.match.covered_by(e.match));
        if (hit && cookie_selects(e, fm)) {
          e.instructions = fm.instructions;
          ++out.modified;
        }
      }
      return out;
    }
    case of::FlowModCommand::kDelete:
    case of::FlowModCommand::kDeleteStrict: {
      const bool strict = fm.command == of::FlowModCommand::kDeleteStrict;
      const size_t before = entries_.size();
      std::erase_if(entries_, [&](const InstalledFlow& e) {
        if (!table_selects(e, fm) || !cookie_selects(e, fm) || !outputs_to(e, fm.out_port)) {
          return false;
        }
        return strict ? (e.priority == fm.priority && e.match == fm.match)
                      : fm.match.covered_by(e.match);
      });
      out.removed = before - entries_.size();
      return out;
    }
  }
  return fail(kErrBadCommand);
}

InstalledFlow* SimFlowTables::lookup(uint8_t table_id, uint32_t in_port, const FrameHeader& h) {
  InstalledFlow* best = nullptr;
  for (auto& e : entries_) {
    if (e.table_id != table_id || !match_applies(e.match, in_port, h)) continue;
    if (best == nullptr || e.priority > best->priority ||
        (e.priority == best->priority && e.seq < best->seq)) {
      best = &e;
    }
  }
  return best;
}

void SimFlowTables::record_hit(uint64_t seq, uint64_t packets, uint64_t bytes, int64_t now_ms) {
  for (auto& e : entries_) {
    if (e.seq != seq) continue;
    e.packet_count += packets;
    e.byte_count += bytes;
    e.last_used_ms = now_ms;
    return;
  }
}

size_t SimFlowTables::expire(int64_t now_ms) {
  const size_t before = entries_.size();
  std::erase_if(entries_, [&](const InstalledFlow& e) {
    if (e.idle_timeout != 0 && now_ms - e.last_used_ms >= int64_t{e.idle_timeout} * 1000) {
      return true;
    }
    return e.hard_timeout != 0 && now_ms - e.installed_ms >= int64_t{e.hard_timeout} * 1000;
  });
  return before - entries_.size();
}

rules::FlowTable SimFlowTables::snapshot(uint64_t dp_id, bool skip_learned) const {
  rules::FlowTable t;
  t.dp_id = dp_id;
  for (const auto& e : entries_) {
    if (skip_learned) {
      auto info = rules::decode_cookie(e.cookie);
      if (info && info->kind == rules::CookieKind::kL2Learned) continue;
    }
    t.entries.push_back(rules::entry_from_instructions(e.table_id, e.priority, e.match,
                                                       e.instructions, e.cookie, e.idle_timeout));
  }
  t.sort();
  return t;
}

}  // namespace sdx::sim
