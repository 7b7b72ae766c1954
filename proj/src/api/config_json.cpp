#include "sdx/api/config_json.h"

#include <set>

#include "sdx/config/emit.h"
#include "sdx/config/parse.h"

namespace sdx::api {

using nlohmann::json;

namespace {

void require_object(const json& j, const char* what, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw BodyError(std::string(what) + " must be an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) throw BodyError(std::string(what) + ": unknown field '" + k + "'");
  }
}

std::string get_string(const json& j, const char* key, bool required) {
  if (!j.contains(key) || j[key].is_null()) {
    if (required) throw BodyError(std::string("missing field '") + key + "'");
    return {};
  }
  if (!j[key].is_string()) throw BodyError(std::string("field '") + key + "' must be a string");
  return j[key].get<std::string>();
}

// Numbers, or strings in decimal or 0x hex as in the YAML files.
std::optional<uint64_t> get_unsigned(const json& j, const char* key, bool required) {
  if (!j.contains(key) || j[key].is_null()) {
    if (required) throw BodyError(std::string("missing field '") + key + "'");
    return std::nullopt;
  }
  const auto& v = j[key];
  if (v.is_number_unsigned()) return v.get<uint64_t>();
  if (v.is_number_integer() && v.get<int64_t>() >= 0) return static_cast<uint64_t>(v.get<int64_t>());
  if (v.is_string()) {
    if (auto n = config::parse_unsigned(v.get<std::string>())) return n;
  }
  throw BodyError(std::string("field '") + key + "' must be a non-negative integer");
}

template <typename T>
T narrow(uint64_t v, const char* key) {
  if (v > std::numeric_limits<T>::max()) throw BodyError(std::string("field '") + key + "' is out of range");
  return static_cast<T>(v);
}

json optional_json(const auto& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json to_json(const config::VlanConfig& vlan) {
  return {{"name", vlan.name}, {"vid", vlan.vid}, {"description", vlan.description}};
}

json to_json(const std::string& dp, config::PortNumber port, const config::InterfaceConfig& iface) {
  return {{"dp", dp},
          {"port", port},
          {"name", iface.name},
          {"description", iface.description},
          {"native_vlan", iface.native_vlan},
          {"acls_in", iface.acls_in}};
}

json to_json(const config::DatapathConfig& dp) {
  json ifaces = json::object();
  for (const auto& [port, iface] : dp.interfaces) {
    auto j = to_json(dp.name, port, iface);
    j.erase("dp");
    j.erase("port");
    ifaces[std::to_string(port)] = j;
  }
  return {{"name", dp.name},
          {"dp_id", dp.dp_id},
          {"dp_id_hex", config::format_hex(dp.dp_id)},
          {"hardware", dp.hardware},
          {"interfaces", ifaces}};
}

json to_json(const std::string& name, const config::AclRules& rules) {
  json arr = json::array();
  for (const auto& r : rules) {
    arr.push_back({{"dl_type", optional_json(r.match.dl_type)},
                   {"ip_proto", optional_json(r.match.ip_proto)},
                   {"actions",
                    {{"allow", r.actions.allow},
                     {"mirror", optional_json(r.actions.mirror)},
                     {"redirect", optional_json(r.actions.redirect)}}}});
  }
  return {{"name", name}, {"rules", arr}};
}

json to_json(const config::FabricConfig& cfg) {
  json vlans = json::array();
  for (const auto& [n, v] : cfg.vlans) vlans.push_back(to_json(v));
  json dps = json::array();
  for (const auto& [n, d] : cfg.dps) dps.push_back(to_json(d));
  json acls = json::array();
  for (const auto& [n, a] : cfg.acls) acls.push_back(to_json(n, a));
  return {{"vlans", vlans}, {"dps", dps}, {"acls", acls}};
}

json to_json(const config::ValidationReport& report) {
  json arr = json::array();
  for (const auto& v : report.violations) {
    arr.push_back({{"code", v.code},
                   {"path", v.path},
                   {"message", v.message},
                   {"kind", config::error_code_name(v.kind)}});
  }
  return arr;
}

json to_json(const controller::ApplyReport& report) {
  json dps = json::array();
  for (const auto& d : report.dps) {
    dps.push_back({{"dp", d.dp},
                   {"dp_id", d.dp_id},
                   {"outcome", controller::outcome_name(d.outcome)},
                   {"added", d.added},
                   {"removed", d.removed},
                   {"duration_ms", d.duration_ms},
                   {"error", d.error}});
  }
  using O = controller::DpApplyResult::Outcome;
  return {{"ok", report.ok},
          {"fingerprint", config::format_hex(report.fingerprint)},
          {"duration_ms", report.duration_ms},
          {"dps", dps},
          {"deferred", report.with_outcome(O::kDeferred)},
          {"failed", report.with_outcome(O::kFailed)},
          {"removed", report.with_outcome(O::kRemoved)}};
}

json to_json(const controller::SessionSummary& s) {
  return {{"id", s.id},
          {"peer", s.peer},
          {"dp_id", optional_json(s.dp_id)},
          {"dp", s.dp_name},
          {"state", controller::state_name(s.state)},
          {"version", s.version},
          {"echo_rtt_ms", optional_json(s.echo_rtt_ms)},
          {"pushed_fingerprint", config::format_hex(s.pushed_fingerprint)},
          {"dead_reason", s.dead_reason}};
}

config::VlanConfig vlan_from_json(const json& j) {
  require_object(j, "vlan", {"name", "vid", "description"});
  config::VlanConfig v;
  v.name = get_string(j, "name", true);
  const auto vid = get_unsigned(j, "vid", true);
  v.vid = static_cast<int64_t>(narrow<uint32_t>(*vid, "vid"));
  v.description = get_string(j, "description", false);
  return v;
}

config::DatapathConfig datapath_from_json(const json& j, bool* has_interfaces) {
  require_object(j, "datapath", {"name", "dp_id", "dp_id_hex", "hardware", "interfaces"});
  config::DatapathConfig dp;
  dp.name = get_string(j, "name", true);
  dp.dp_id = *get_unsigned(j, "dp_id", true);
  dp.hardware = get_string(j, "hardware", false);
  const bool has = j.contains("interfaces") && !j["interfaces"].is_null();
  if (has_interfaces) *has_interfaces = has;
  if (has) {
    if (!j["interfaces"].is_object()) throw BodyError("interfaces must be an object keyed by port");
    for (const auto& [key, value] : j["interfaces"].items()) {
      const auto port = config::parse_unsigned(key);
      if (!port) throw BodyError("interface key '" + key + "' is not a port number");
      json body = value;
      if (!body.is_object()) throw BodyError("interface must be an object");
      body["dp"] = dp.name;
      body["port"] = *port;
      dp.interfaces[narrow<uint32_t>(*port, "port")] = interface_from_json(body).iface;
    }
  }
  return dp;
}

InterfaceBody interface_from_json(const json& j) {
  require_object(j, "interface", {"dp", "port", "name", "description", "native_vlan", "acls_in"});
  InterfaceBody b;
  b.dp = get_string(j, "dp", true);
  b.port = narrow<uint32_t>(*get_unsigned(j, "port", true), "port");
  b.iface.name = get_string(j, "name", false);
  b.iface.description = get_string(j, "description", false);
  b.iface.native_vlan = get_string(j, "native_vlan", true);
  if (j.contains("acls_in") && !j["acls_in"].is_null()) {
    if (!j["acls_in"].is_array()) throw BodyError("acls_in must be a list of names");
    for (const auto& a : j["acls_in"]) {
      if (!a.is_string()) throw BodyError("acls_in must be a list of names");
      b.iface.acls_in.push_back(a.get<std::string>());
    }
  }
  return b;
}

std::pair<std::string, config::AclRules> acl_from_json(const json& j) {
  require_object(j, "acl", {"name", "rules"});
  const auto name = get_string(j, "name", true);
  if (!j.contains("rules") || !j["rules"].is_array()) throw BodyError("rules must be a list");
  config::AclRules rules;
  for (const auto& r : j["rules"]) {
    require_object(r, "rule", {"dl_type", "ip_proto", "actions"});
    config::AclRule rule;
    if (auto v = get_unsigned(r, "dl_type", false)) rule.match.dl_type = narrow<uint16_t>(*v, "dl_type");
    if (auto v = get_unsigned(r, "ip_proto", false)) rule.match.ip_proto = narrow<uint8_t>(*v, "ip_proto");
    if (!r.contains("actions")) throw BodyError("missing field 'actions'");
    const auto& a = r["actions"];
    require_object(a, "actions", {"allow", "mirror", "redirect"});
    if (a.contains("allow") && !a["allow"].is_null()) {
      if (!a["allow"].is_boolean()) throw BodyError("field 'allow' must be a boolean");
      rule.actions.allow = a["allow"].get<bool>();
    }
    if (auto v = get_unsigned(a, "mirror", false)) rule.actions.mirror = narrow<uint32_t>(*v, "mirror");
    if (auto v = get_unsigned(a, "redirect", false)) rule.actions.redirect = narrow<uint32_t>(*v, "redirect");
    rules.push_back(rule);
  }
  return {name, rules};
}

}  // namespace sdx::api
