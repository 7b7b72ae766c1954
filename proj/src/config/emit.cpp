#include "sdx/config/emit.h"

#include <cstdio>
#include <set>
#include <sstream>

#include "sdx/common/hash.h"
#include "sdx/config/validate.h"

namespace sdx::config {

std::string format_hex(uint64_t value) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "0x%llx", static_cast<unsigned long long>(value));
  return buf;
}

namespace {

bool needs_quotes(std::string_view s) {
  static const std::set<std::string_view> kReserved = {
      "true", "false", "True", "False", "TRUE", "FALSE", "yes", "no", "Yes", "No",
      "on",   "off",   "On",   "Off",   "null", "Null", "NULL", "~"};
  if (!is_identifier(s)) return true;
  if (s.front() >= '0' && s.front() <= '9') return true;
  return kReserved.count(s) != 0;
}

std::string quoted(std::string_view s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20 || c == 0x7f) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\x%02x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
  return out;
}

std::string name(std::string_view s) { return needs_quotes(s) ? quoted(s) : std::string(s); }

void write_rules(std::ostream& out, const AclRules& rules, const std::string& indent) {
  for (const auto& rule : rules) {
    out << indent << "- rule:\n";
    const std::string body = indent + "    ";
    if (rule.match.dl_type) out << body << "dl_type: " << format_hex(*rule.match.dl_type) << "\n";
    if (rule.match.ip_proto) out << body << "ip_proto: " << unsigned(*rule.match.ip_proto) << "\n";
    out << body << "actions:\n";
    out << body << "  allow: " << (rule.actions.allow ? "true" : "false") << "\n";
    if (rule.actions.mirror) out << body << "  mirror: " << *rule.actions.mirror << "\n";
    if (rule.actions.redirect) out << body << "  redirect: " << *rule.actions.redirect << "\n";
  }
}

void write_acls(std::ostream& out, const std::map<std::string, AclRules>& acls) {
  out << "acls:\n";
  for (const auto& [acl_name, rules] : acls) {
    if (rules.empty()) {
      out << "  " << name(acl_name) << ": []\n";
      continue;
    }
    out << "  " << name(acl_name) << ":\n";
    write_rules(out, rules, "    ");
  }
}

std::string render(const FabricConfig& cfg) {
  std::ostringstream out;
  out << "vlans:\n";
  for (const auto& [key, vlan] : cfg.vlans) {
    out << "  " << name(key) << ":\n";
    out << "    vid: " << vlan.vid << "\n";
    if (!vlan.description.empty()) out << "    description: " << quoted(vlan.description) << "\n";
  }
  out << "dps:\n";
  for (const auto& [key, dp] : cfg.dps) {
    out << "  " << name(key) << ":\n";
    out << "    dp_id: " << format_hex(dp.dp_id) << "\n";
    if (!dp.hardware.empty()) out << "    hardware: " << quoted(dp.hardware) << "\n";
    if (dp.interfaces.empty()) {
      out << "    interfaces: {}\n";
      continue;
    }
    out << "    interfaces:\n";
    for (const auto& [port, iface] : dp.interfaces) {
      out << "      " << port << ":\n";
      if (!iface.name.empty()) out << "        name: " << quoted(iface.name) << "\n";
      if (!iface.description.empty()) {
        out << "        description: " << quoted(iface.description) << "\n";
      }
      out << "        native_vlan: " << name(iface.native_vlan) << "\n";
      if (!iface.acls_in.empty()) {
        out << "        acls_in: [";
        for (size_t i = 0; i < iface.acls_in.size(); ++i) {
          out << (i ? ", " : "") << name(iface.acls_in[i]);
        }
        out << "]\n";
      }
    }
  }
  if (!cfg.acls.empty()) write_acls(out, cfg.acls);
  return out.str();
}

}  // namespace

std::string emit_config(const FabricConfig& cfg) {
  require_valid(cfg);
  return render(cfg);
}

std::string emit_acls(const std::map<std::string, AclRules>& acls) {
  std::ostringstream out;
  write_acls(out, acls);
  return out.str();
}

uint64_t config_fingerprint(const FabricConfig& cfg) { return fnv1a64(render(cfg)); }

uint64_t datapath_fingerprint(const FabricConfig& cfg, std::string_view dp) {
  FabricConfig slice;
  const DatapathConfig* d = cfg.find_dp(dp);
  if (d == nullptr) return 0;
  slice.dps.emplace(d->name, *d);
  for (const auto& [port, iface] : d->interfaces) {
    if (auto it = cfg.vlans.find(iface.native_vlan); it != cfg.vlans.end()) {
      slice.vlans.insert(*it);
    }
    for (const auto& acl : iface.acls_in) {
      if (auto it = cfg.acls.find(acl); it != cfg.acls.end()) slice.acls.insert(*it);
    }
  }
  return fnv1a64(render(slice));
}

}  // namespace sdx::config
