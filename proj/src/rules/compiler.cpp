#include "sdx/rules/compiler.h"

#include "sdx/common/hash.h"
#include "sdx/config/emit.h"

namespace sdx::rules {

namespace {

of::Match acl_match(uint32_t in_port, const config::AclMatch& m) {
  of::Match out;
  out.in_port = in_port;
  out.eth_type = m.dl_type;
  out.ip_proto = m.ip_proto;
  return out;
}

void require_port(const config::DatapathConfig& dp, config::PortNumber port, std::string_view what,
                  const std::string& acl) {
  if (dp.interfaces.count(port) == 0) {
    throw CompileError(std::string(what) + " port " + std::to_string(port) + " of ACL \"" + acl +
                       "\" not on datapath " + dp.name);
  }
}

FlowEntry acl_entry(const config::DatapathConfig& dp, uint32_t in_port, const std::string& acl,
                    uint16_t rule_index, const config::AclRule& rule, uint16_t priority) {
  FlowEntry e;
  e.table_id = static_cast<uint8_t>(Table::kAcl);
  e.priority = priority;
  e.match = acl_match(in_port, rule.match);
  const auto& a = rule.actions;
  if (a.mirror) {
    require_port(dp, *a.mirror, "mirror", acl);
    e.outputs.push_back(*a.mirror);
  }
  CookieKind kind;
  if (a.redirect) {
    require_port(dp, *a.redirect, "redirect", acl);
    e.outputs.push_back(*a.redirect);
    kind = CookieKind::kAclRedirect;
  } else if (a.allow) {
    e.goto_table = static_cast<uint8_t>(Table::kVlan);
    kind = CookieKind::kAclAllow;
  } else {
    kind = CookieKind::kAclDrop;
  }
  e.cookie = encode_cookie(kind, acl, rule_index);
  return e;
}

}  // namespace

FlowTable compile_datapath(const config::FabricConfig& cfg, std::string_view dp_name) {
  const auto* dp = cfg.find_dp(dp_name);
  if (dp == nullptr) throw CompileError("unknown datapath " + std::string(dp_name));

  FlowTable t;
  t.dp_id = dp->dp_id;
  t.dp_name = dp->name;
  t.fingerprint = config::datapath_fingerprint(cfg, dp_name);

  for (const auto& [port, iface] : dp->interfaces) {
    bool terminal = false;
    int k = 0;
    for (const auto& acl_name : iface.acls_in) {
      auto it = cfg.acls.find(acl_name);
      if (it == cfg.acls.end()) {
        throw CompileError("unresolved ACL \"" + acl_name + "\" on datapath " + dp->name);
      }
      uint16_t index = 0;
      for (const auto& rule : it->second) {
        ++k;
        if (k >= kAclBasePriority - kCatchAllPriority) {
          throw CompileError("too many ACL rules on port " + std::to_string(port));
        }
        if (!terminal) {
          t.entries.push_back(acl_entry(*dp, port, acl_name, index, rule,
                                        static_cast<uint16_t>(kAclBasePriority - k)));
        }
        if (rule.match.empty()) terminal = true;
        ++index;
      }
    }
    if (!terminal) {
      FlowEntry catch_all;
      catch_all.table_id = static_cast<uint8_t>(Table::kAcl);
      catch_all.priority = kCatchAllPriority;
      catch_all.match.in_port = port;
      catch_all.goto_table = static_cast<uint8_t>(Table::kVlan);
      catch_all.cookie = encode_cookie(CookieKind::kCatchAll, "", 0);
      t.entries.push_back(catch_all);
    }

    const auto& vlan = cfg.vlans.at(iface.native_vlan);
    FlowEntry assign;
    assign.table_id = static_cast<uint8_t>(Table::kVlan);
    assign.priority = kVlanPriority;
    assign.match.in_port = port;
    assign.goto_table = static_cast<uint8_t>(Table::kL2);
    assign.cookie = encode_cookie(CookieKind::kVlan, vlan.name, static_cast<uint16_t>(vlan.vid));
    t.entries.push_back(assign);
  }
  t.entries.push_back(l2_miss_entry());
  t.sort();
  return t;
}

std::map<std::string, FlowTable> compile_all(const config::FabricConfig& cfg) {
  std::map<std::string, FlowTable> out;
  for (const auto& [name, dp] : cfg.dps) out.emplace(name, compile_datapath(cfg, name));
  return out;
}

FlowEntry l2_miss_entry() {
  FlowEntry e;
  e.table_id = static_cast<uint8_t>(Table::kL2);
  e.priority = kL2MissPriority;
  e.outputs.push_back(of::port::kController);
  e.cookie = encode_cookie(CookieKind::kL2Miss, "", 0);
  return e;
}

FlowEntry l2_learned_entry(uint32_t in_port, const of::MacAddress& dst, uint32_t out_port) {
  FlowEntry e;
  e.table_id = static_cast<uint8_t>(Table::kL2);
  e.priority = kL2LearnedPriority;
  e.match.in_port = in_port;
  e.match.eth_dst = dst;
  e.outputs.push_back(out_port);
  e.idle_timeout = kL2IdleTimeout;
  e.cookie = encode_cookie(CookieKind::kL2Learned, "", 0);
  return e;
}

std::vector<uint32_t> vlan_flood_ports(const config::DatapathConfig& dp, uint32_t in_port) {
  std::vector<uint32_t> out;
  auto it = dp.interfaces.find(in_port);
  if (it == dp.interfaces.end()) return out;
  for (const auto& [port, iface] : dp.interfaces) {
    if (port != in_port && iface.native_vlan == it->second.native_vlan) out.push_back(port);
  }
  return out;
}

std::optional<std::pair<std::string, uint16_t>> resolve_acl_cookie(const config::FabricConfig& cfg,
                                                                   uint64_t cookie) {
  auto info = decode_cookie(cookie);
  if (!info) return std::nullopt;
  if (info->kind != CookieKind::kAclAllow && info->kind != CookieKind::kAclDrop &&
      info->kind != CookieKind::kAclRedirect) {
    return std::nullopt;
  }
  for (const auto& [name, rules] : cfg.acls) {
    if (fnv1a32(name) == info->name_hash && info->index < rules.size()) {
      return std::make_pair(name, info->index);
    }
  }
  return std::nullopt;
}

}  // namespace sdx::rules
