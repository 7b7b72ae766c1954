#include "sdx/config/parse.h"

#include <charconv>
#include <limits>

#include "sdx/config/validate.h"
#include "yaml_tree.h"

namespace sdx::config {

using detail::YamlNode;

std::optional<uint64_t> parse_unsigned(std::string_view text) {
  int base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    base = 16;
    text.remove_prefix(2);
  }
  if (text.empty()) return std::nullopt;
  uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& message, const YamlNode& at) {
  throw ConfigError(code, message, at.line, at.column);
}

const YamlNode& expect_map(const YamlNode& node, const std::string& where) {
  if (!node.is_map()) {
    fail(ErrorCode::kTypeMismatch,
         where + ": expected map, found " + std::string(detail::kind_name(node.kind)), node);
  }
  return node;
}

std::string read_string(const YamlNode& node, const std::string& where) {
  if (node.is_null()) return {};
  if (!node.is_scalar()) fail(ErrorCode::kTypeMismatch, where + ": expected scalar", node);
  return node.scalar;
}

uint64_t read_unsigned(const YamlNode& node, const std::string& where, uint64_t max) {
  if (!node.is_scalar()) fail(ErrorCode::kTypeMismatch, where + ": expected integer", node);
  auto value = parse_unsigned(node.scalar);
  if (!value) {
    fail(ErrorCode::kTypeMismatch, where + ": '" + node.scalar + "' is not an integer", node);
  }
  if (*value > max) {
    fail(ErrorCode::kInvalidValue, where + ": " + node.scalar + " is out of range", node);
  }
  return *value;
}

bool read_bool(const YamlNode& node, const std::string& where) {
  if (node.is_scalar() && !node.quoted) {
    const auto& s = node.scalar;
    if (s == "true" || s == "True") return true;
    if (s == "false" || s == "False") return false;
  }
  fail(ErrorCode::kTypeMismatch, where + ": expected boolean (true/false)", node);
}

[[noreturn]] void unknown_key(const YamlNode& key, const std::string& where) {
  fail(ErrorCode::kUnknownKey, "unknown key '" + key.scalar + "' in " + where, key);
}

void require_key(const YamlNode& map, bool present, const std::string& key,
                 const std::string& where) {
  if (!present) fail(ErrorCode::kMissingSection, "missing key: " + key + " in " + where, map);
}

VlanConfig parse_vlan(const std::string& name, const YamlNode& body) {
  const std::string where = "vlans." + name;
  expect_map(body, where);
  VlanConfig vlan;
  vlan.name = name;
  bool has_vid = false;
  for (const auto& [key, value] : body.map) {
    if (key.scalar == "vid") {
      vlan.vid = static_cast<int64_t>(read_unsigned(value, where + ".vid", 0xffff));
      has_vid = true;
    } else if (key.scalar == "description") {
      vlan.description = read_string(value, where + ".description");
    } else {
      unknown_key(key, where);
    }
  }
  require_key(body, has_vid, "vid", where);
  return vlan;
}

InterfaceConfig parse_interface(const YamlNode& body, const std::string& where) {
  expect_map(body, where);
  InterfaceConfig iface;
  bool has_vlan = false;
  for (const auto& [key, value] : body.map) {
    if (key.scalar == "name") {
      iface.name = read_string(value, where + ".name");
    } else if (key.scalar == "description") {
      iface.description = read_string(value, where + ".description");
    } else if (key.scalar == "native_vlan") {
      iface.native_vlan = read_string(value, where + ".native_vlan");
      has_vlan = true;
    } else if (key.scalar == "acls_in") {
      if (value.is_null()) continue;
      if (!value.is_seq()) fail(ErrorCode::kTypeMismatch, where + ".acls_in: expected list", value);
      for (const auto& item : value.seq) {
        if (!item.is_scalar()) {
          fail(ErrorCode::kTypeMismatch, where + ".acls_in: expected ACL names", item);
        }
        iface.acls_in.push_back(item.scalar);
      }
    } else {
      unknown_key(key, where);
    }
  }
  require_key(body, has_vlan, "native_vlan", where);
  return iface;
}

AclRule parse_rule(const YamlNode& item, const std::string& where) {
  expect_map(item, where);
  if (item.map.size() != 1 || item.map.front().first.scalar != "rule") {
    fail(ErrorCode::kUnknownKey, where + ": each ACL entry must be a single 'rule' map", item);
  }
  const YamlNode& body = item.map.front().second;
  const std::string rule_where = where + ".rule";
  AclRule rule;
  if (body.is_null()) return rule;
  expect_map(body, rule_where);
  for (const auto& [key, value] : body.map) {
    if (key.scalar == "dl_type") {
      rule.match.dl_type = static_cast<uint16_t>(read_unsigned(value, rule_where + ".dl_type", 0xffff));
    } else if (key.scalar == "ip_proto") {
      rule.match.ip_proto = static_cast<uint8_t>(read_unsigned(value, rule_where + ".ip_proto", 0xff));
    } else if (key.scalar == "actions") {
      const std::string act_where = rule_where + ".actions";
      if (value.is_null()) continue;
      expect_map(value, act_where);
      for (const auto& [akey, avalue] : value.map) {
        if (akey.scalar == "allow") {
          rule.actions.allow = read_bool(avalue, act_where + ".allow");
        } else if (akey.scalar == "mirror") {
          rule.actions.mirror =
              static_cast<PortNumber>(read_unsigned(avalue, act_where + ".mirror", 0xffffffff));
        } else if (akey.scalar == "redirect") {
          rule.actions.redirect =
              static_cast<PortNumber>(read_unsigned(avalue, act_where + ".redirect", 0xffffffff));
        } else {
          unknown_key(akey, act_where);
        }
      }
    } else {
      unknown_key(key, rule_where);
    }
  }
  return rule;
}

void parse_acls(const YamlNode& section, const std::string& where, FabricConfig& cfg) {
  if (section.is_null()) return;
  expect_map(section, where);
  for (const auto& [key, value] : section.map) {
    const std::string acl_where = where + "." + key.scalar;
    if (cfg.acls.count(key.scalar) != 0) {
      fail(ErrorCode::kDuplicateKey, "duplicate ACL '" + key.scalar + "'", key);
    }
    AclRules rules;
    if (!value.is_null()) {
      if (!value.is_seq()) fail(ErrorCode::kTypeMismatch, acl_where + ": expected list of rules", value);
      for (size_t i = 0; i < value.seq.size(); ++i) {
        rules.push_back(parse_rule(value.seq[i], acl_where + "[" + std::to_string(i) + "]"));
      }
    }
    cfg.acls.emplace(key.scalar, std::move(rules));
  }
}

DatapathConfig parse_dp(const std::string& name, const YamlNode& body, FabricConfig& cfg,
                        std::vector<std::string>& warnings) {
  const std::string where = "dps." + name;
  expect_map(body, where);
  DatapathConfig dp;
  dp.name = name;
  bool has_id = false;
  for (const auto& [key, value] : body.map) {
    if (key.scalar == "dp_id") {
      dp.dp_id = read_unsigned(value, where + ".dp_id", std::numeric_limits<uint64_t>::max());
      has_id = true;
    } else if (key.scalar == "hardware") {
      dp.hardware = read_string(value, where + ".hardware");
    } else if (key.scalar == "interfaces") {
      if (value.is_null()) continue;
      expect_map(value, where + ".interfaces");
      for (const auto& [pkey, pvalue] : value.map) {
        const std::string pwhere = where + ".interfaces." + pkey.scalar;
        auto port = static_cast<PortNumber>(read_unsigned(pkey, pwhere, 0xffffffff));
        if (dp.interfaces.count(port) != 0) {
          fail(ErrorCode::kDuplicateKey, "duplicate port " + std::to_string(port) + " on " + name, pkey);
        }
        dp.interfaces.emplace(port, parse_interface(pvalue, pwhere));
      }
    } else if (key.scalar == "acls") {
      warnings.push_back("acls nested under dps." + name + " hoisted to top level");
      parse_acls(value, where + ".acls", cfg);
    } else {
      unknown_key(key, where);
    }
  }
  require_key(body, has_id, "dp_id", where);
  return dp;
}

}  // namespace

ParsedDocument parse_document(std::string_view text) {
  const YamlNode root = detail::load_yaml(text);
  if (!root.is_map()) fail(ErrorCode::kTypeMismatch, "document root must be a map", root);

  ParsedDocument out;
  const YamlNode* vlans = nullptr;
  const YamlNode* dps = nullptr;
  const YamlNode* acls = nullptr;
  for (const auto& [key, value] : root.map) {
    if (key.scalar == "vlans" || key.scalar == "vlangs") {
      if (vlans != nullptr) fail(ErrorCode::kDuplicateKey, "both 'vlans' and 'vlangs' present", key);
      if (key.scalar == "vlangs") out.warnings.push_back("'vlangs' read as 'vlans'");
      vlans = &value;
    } else if (key.scalar == "dps") {
      dps = &value;
    } else if (key.scalar == "acls") {
      acls = &value;
    } else {
      unknown_key(key, "document root");
    }
  }
  if (vlans == nullptr) fail(ErrorCode::kMissingSection, "missing section: vlans", root);
  if (dps == nullptr) fail(ErrorCode::kMissingSection, "missing section: dps", root);

  FabricConfig& cfg = out.config;
  if (acls != nullptr) parse_acls(*acls, "acls", cfg);
  if (!vlans->is_null()) {
    expect_map(*vlans, "vlans");
    for (const auto& [key, value] : vlans->map) cfg.vlans.emplace(key.scalar, parse_vlan(key.scalar, value));
  }
  if (!dps->is_null()) {
    expect_map(*dps, "dps");
    for (const auto& [key, value] : dps->map) {
      cfg.dps.emplace(key.scalar, parse_dp(key.scalar, value, cfg, out.warnings));
    }
  }
  return out;
}

FabricConfig parse_config(std::string_view text) {
  ParsedDocument doc = parse_document(text);
  require_valid(doc.config);
  return std::move(doc.config);
}

}  // namespace sdx::config
