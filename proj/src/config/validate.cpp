#include "sdx/config/validate.h"

#include <map>
#include <set>

#include "sdx/config/emit.h"

namespace sdx::config {

bool ValidationReport::has(std::string_view code) const {
  for (const auto& v : violations) {
    if (v.code == code) return true;
  }
  return false;
}

bool is_identifier(std::string_view name) {
  if (name.empty()) return false;
  auto ok = [](char c, bool first) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_') {
      return true;
    }
    return !first && (c == '-' || c == '.');
  };
  for (size_t i = 0; i < name.size(); ++i) {
    if (!ok(name[i], i == 0)) return false;
  }
  return true;
}

namespace {

class Checker {
 public:
  explicit Checker(const FabricConfig& cfg) : cfg_(cfg) {}

  ValidationReport run(const ValidateOptions& options) {
    check_vlans();
    check_dps();
    check_acls();
    if (options.require_nonempty) {
      if (cfg_.vlans.empty()) add("no_vlans", "vlans", "at least one VLAN is required");
      if (cfg_.dps.empty()) add("no_datapaths", "dps", "at least one datapath is required");
    }
    return std::move(report_);
  }

 private:
  void add(std::string code, std::string path, std::string message,
           ErrorCode kind = ErrorCode::kInvariant) {
    report_.violations.push_back({std::move(code), std::move(path), std::move(message), kind});
  }

  void check_name(const std::string& key, const std::string& name, const std::string& path) {
    if (!is_identifier(key)) add("invalid_name", path, "'" + key + "' is not a valid identifier");
    if (key != name) add("name_mismatch", path, "entry keyed '" + key + "' is named '" + name + "'");
  }

  void check_vlans() {
    std::map<int64_t, std::string> seen;
    for (const auto& [key, vlan] : cfg_.vlans) {
      const std::string path = "vlans." + key;
      check_name(key, vlan.name, path);
      if (vlan.vid < 1 || vlan.vid > 4094) {
        add("vid_out_of_range", path + ".vid",
            "vid " + std::to_string(vlan.vid) + " outside 1..4094");
      }
      auto [it, fresh] = seen.emplace(vlan.vid, key);
      if (!fresh) {
        add("duplicate_vid", path + ".vid",
            "duplicate vid " + std::to_string(vlan.vid) + " (also used by " + it->second + ")");
      }
    }
  }

  void check_dps() {
    std::map<uint64_t, std::string> seen;
    for (const auto& [key, dp] : cfg_.dps) {
      const std::string path = "dps." + key;
      check_name(key, dp.name, path);
      if (dp.dp_id == 0) add("invalid_dp_id", path + ".dp_id", "dp_id must be positive");
      auto [it, fresh] = seen.emplace(dp.dp_id, key);
      if (!fresh) {
        add("duplicate_dp_id", path + ".dp_id",
            "duplicate dp_id " + format_hex(dp.dp_id) + " (also used by " + it->second + ")");
      }
      for (const auto& [port, iface] : dp.interfaces) {
        const std::string ipath = path + ".interfaces." + std::to_string(port);
        if (port == 0 || port > kMaxPortNumber) {
          add("invalid_port", ipath, "port " + std::to_string(port) + " is not a valid port number");
        }
        if (!iface.name.empty() && !is_identifier(iface.name)) {
          add("invalid_name", ipath + ".name", "'" + iface.name + "' is not a valid identifier");
        }
        if (cfg_.vlans.count(iface.native_vlan) == 0) {
          add("unresolved_vlan", ipath + ".native_vlan",
              "unresolved VLAN \"" + iface.native_vlan + "\" on datapath " + key + " port " +
                  std::to_string(port),
              ErrorCode::kUnresolvedReference);
        }
        for (const auto& acl : iface.acls_in) {
          if (cfg_.acls.count(acl) == 0) {
            add("unresolved_acl", ipath + ".acls_in",
                "unresolved ACL \"" + acl + "\" on datapath " + key + " port " + std::to_string(port),
                ErrorCode::kUnresolvedReference);
          }
        }
      }
    }
  }

  void check_acls() {
    // ACL name -> datapaths whose interfaces reference it.
    std::map<std::string, std::set<std::string>> users;
    for (const auto& [dp_name, dp] : cfg_.dps) {
      for (const auto& [port, iface] : dp.interfaces) {
        for (const auto& acl : iface.acls_in) users[acl].insert(dp_name);
      }
    }
    for (const auto& [name, rules] : cfg_.acls) {
      const std::string path = "acls." + name;
      if (!is_identifier(name)) add("invalid_name", path, "'" + name + "' is not a valid identifier");
      for (size_t i = 0; i < rules.size(); ++i) {
        const AclRule& rule = rules[i];
        const std::string rpath = path + "[" + std::to_string(i) + "]";
        if (rule.match.ip_proto) {
          const bool ip = rule.match.dl_type && (*rule.match.dl_type == kEthTypeIpv4 ||
                                                 *rule.match.dl_type == kEthTypeIpv6);
          if (!ip) {
            add("ip_proto_requires_ip", rpath + ".ip_proto",
                "ip_proto requires dl_type 0x800 or 0x86dd");
          }
        }
        if (rule.actions.redirect && rule.actions.allow) {
          add("conflicting_disposition", rpath + ".actions",
              "redirect and allow: true cannot both be terminal");
        }
        for (const auto& dp_name : users[name]) {
          const DatapathConfig& dp = cfg_.dps.at(dp_name);
          if (rule.actions.mirror && dp.interfaces.count(*rule.actions.mirror) == 0) {
            add("mirror_port_missing", rpath + ".actions.mirror",
                "mirror port " + std::to_string(*rule.actions.mirror) + " not on datapath " + dp_name,
                ErrorCode::kUnresolvedReference);
          }
          if (rule.actions.redirect && dp.interfaces.count(*rule.actions.redirect) == 0) {
            add("redirect_port_missing", rpath + ".actions.redirect",
                "redirect port " + std::to_string(*rule.actions.redirect) + " not on datapath " +
                    dp_name,
                ErrorCode::kUnresolvedReference);
          }
        }
      }
    }
  }

  const FabricConfig& cfg_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate(const FabricConfig& cfg, ValidateOptions options) {
  return Checker(cfg).run(options);
}

void require_valid(const FabricConfig& cfg, ValidateOptions options) {
  ValidationReport report = validate(cfg, options);
  if (!report.ok()) {
    const Violation& first = report.violations.front();
    throw ConfigError(first.kind, first.message);
  }
}

}  // namespace sdx::config
