#include "sdx/sim/topology.h"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sdx::sim {

const SwitchSpec* TopologySpec::find_switch(std::string_view name) const {
  for (const auto& s : switches) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const HostSpec* TopologySpec::find_host(std::string_view name) const {
  for (const auto& h : hosts) {
    if (h.name == name) return &h;
  }
  return nullptr;
}

void validate_flow(const TopologySpec& spec, const FlowSpec& f) {
  const std::string where = "flow '" + f.name + "'";
  if (f.name.empty()) throw TopologyError("flow without a name");
  if (spec.find_host(f.src) == nullptr) throw TopologyError(where + ": unknown src host '" + f.src + "'");
  if (spec.find_host(f.dst) == nullptr) throw TopologyError(where + ": unknown dst host '" + f.dst + "'");
  if (f.pps == 0) throw TopologyError(where + ": pps must be > 0");
  if (f.bytes < kMinFrameBytes || f.bytes > kMaxFrameBytes) {
    throw TopologyError(where + ": bytes must be in [64, 9000], got " + std::to_string(f.bytes));
  }
  if (f.start_ms < 0) throw TopologyError(where + ": start must be >= 0");
  if (f.stop_ms && *f.stop_ms < f.start_ms) throw TopologyError(where + ": stop before start");
}

void validate_topology(const TopologySpec& spec) {
  std::set<std::string> names;
  std::set<uint64_t> dp_ids;
  for (const auto& s : spec.switches) {
    if (s.name.empty()) throw TopologyError("switch without a name");
    if (!names.insert(s.name).second) throw TopologyError("duplicate name '" + s.name + "'");
    if (!dp_ids.insert(s.dp_id).second) {
      throw TopologyError("duplicate dp_id " + std::to_string(s.dp_id) + " on switch '" + s.name + "'");
    }
    if (s.ports == 0 || s.ports > 0xffffff00u) throw TopologyError("switch '" + s.name + "': bad port count");
  }
  std::set<std::pair<std::string, uint32_t>> attached;
  std::set<of::MacAddress> macs;
  for (const auto& h : spec.hosts) {
    if (h.name.empty()) throw TopologyError("host without a name");
    if (!names.insert(h.name).second) throw TopologyError("duplicate name '" + h.name + "'");
    const auto* sw = spec.find_switch(h.switch_name);
    if (sw == nullptr) {
      throw TopologyError("host '" + h.name + "': unknown switch '" + h.switch_name + "'");
    }
    if (h.port == 0 || h.port > sw->ports) {
      throw TopologyError("host '" + h.name + "': port " + std::to_string(h.port) + " not on switch '" +
                          sw->name + "' (" + std::to_string(sw->ports) + " ports)");
    }
    if (!attached.insert({h.switch_name, h.port}).second) {
      throw TopologyError("host '" + h.name + "': port " + std::to_string(h.port) + " already taken");
    }
    if (h.mac.is_multicast()) throw TopologyError("host '" + h.name + "': multicast MAC");
    if (!macs.insert(h.mac).second) throw TopologyError("host '" + h.name + "': duplicate MAC");
  }
  std::set<std::string> flow_names;
  for (const auto& f : spec.flows) {
    validate_flow(spec, f);
    if (!flow_names.insert(f.name).second) throw TopologyError("duplicate flow '" + f.name + "'");
  }
}

namespace {

template <typename T>
T scalar(const YAML::Node& node, const std::string& what) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw TopologyError("bad value for " + what);
  }
}

uint64_t integer(const YAML::Node& node, const std::string& what) {
  const std::string text = scalar<std::string>(node, what);
  try {
    size_t used = 0;
    const uint64_t v = std::stoull(text, &used, 0);
    if (used != text.size()) throw TopologyError("bad integer for " + what + ": " + text);
    return v;
  } catch (const std::logic_error&) {
    throw TopologyError("bad integer for " + what + ": " + text);
  }
}

int64_t seconds_to_ms(const YAML::Node& node, const std::string& what) {
  const double s = scalar<double>(node, what);
  if (!std::isfinite(s) || s < 0 || s > 1e9) throw TopologyError("bad time for " + what);
  return std::llround(s * 1000.0);
}

const YAML::Node required(const YAML::Node& node, const char* key, const std::string& where) {
  auto v = node[key];
  if (!v) throw TopologyError(where + ": missing '" + key + "'");
  return v;
}

void check_keys(const YAML::Node& node, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!node.IsMap()) throw TopologyError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw TopologyError(where + ": unknown key '" + key + "'");
  }
}

}  // namespace

TopologySpec parse_topology(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw TopologyError(std::string("yaml: ") + e.what());
  }
  if (!root.IsMap()) throw TopologyError("topology must be a mapping");
  check_keys(root, {"switches", "hosts", "flows"}, "topology");
  TopologySpec spec;
  for (const auto& n : root["switches"]) {
    check_keys(n, {"name", "dp_id", "ports"}, "switch");
    SwitchSpec s;
    s.name = scalar<std::string>(required(n, "name", "switch"), "switch name");
    const std::string where = "switch '" + s.name + "'";
    s.dp_id = integer(required(n, "dp_id", where), where + " dp_id");
    s.ports = static_cast<uint32_t>(integer(required(n, "ports", where), where + " ports"));
    spec.switches.push_back(std::move(s));
  }
  int index = 0;
  for (const auto& n : root["hosts"]) {
    check_keys(n, {"name", "switch", "port", "mac", "vlan"}, "host");
    HostSpec h;
    h.name = scalar<std::string>(required(n, "name", "host"), "host name");
    const std::string where = "host '" + h.name + "'";
    h.switch_name = scalar<std::string>(required(n, "switch", where), where + " switch");
    h.port = static_cast<uint32_t>(integer(required(n, "port", where), where + " port"));
    ++index;
    if (n["mac"]) {
      auto mac = of::MacAddress::parse(scalar<std::string>(n["mac"], where + " mac"));
      if (!mac) throw TopologyError(where + ": bad MAC");
      h.mac = *mac;
    } else {
      h.mac = of::MacAddress::from_u64(0x0e0000000000ull + static_cast<uint64_t>(index));
    }
    if (n["vlan"]) h.vlan = scalar<std::string>(n["vlan"], where + " vlan");
    spec.hosts.push_back(std::move(h));
  }
  for (const auto& n : root["flows"]) {
    check_keys(n, {"name", "src", "dst", "pps", "bytes", "eth_type", "ip_proto", "start", "stop"}, "flow");
    FlowSpec f;
    f.name = scalar<std::string>(required(n, "name", "flow"), "flow name");
    const std::string where = "flow '" + f.name + "'";
    f.src = scalar<std::string>(required(n, "src", where), where + " src");
    f.dst = scalar<std::string>(required(n, "dst", where), where + " dst");
    f.pps = integer(required(n, "pps", where), where + " pps");
    f.bytes = static_cast<uint32_t>(integer(required(n, "bytes", where), where + " bytes"));
    if (n["eth_type"]) {
      const uint64_t v = integer(n["eth_type"], where + " eth_type");
      if (v > 0xffff) throw TopologyError(where + ": eth_type out of range");
      f.eth_type = static_cast<uint16_t>(v);
    }
    if (n["ip_proto"]) {
      const uint64_t v = integer(n["ip_proto"], where + " ip_proto");
      if (v > 0xff) throw TopologyError(where + ": ip_proto out of range");
      f.ip_proto = static_cast<uint8_t>(v);
    }
    if (n["start"]) f.start_ms = seconds_to_ms(n["start"], where + " start");
    if (n["stop"]) f.stop_ms = seconds_to_ms(n["stop"], where + " stop");
    spec.flows.push_back(std::move(f));
  }
  validate_topology(spec);
  return spec;
}

TopologySpec load_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TopologyError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_topology(ss.str());
}

TopologySpec star_topology(int n_hosts, uint32_t n_ports) {
  TopologySpec spec;
  spec.switches.push_back({"sw1", 0x1, n_ports});
  for (int i = 1; i <= n_hosts; ++i) {
    HostSpec h;
    h.name = "AS" + std::to_string(i);
    h.switch_name = "sw1";
    h.port = static_cast<uint32_t>(i);
    h.mac = of::MacAddress::from_u64(0x0e0000000000ull + static_cast<uint64_t>(i));
    h.vlan = "office";
    spec.hosts.push_back(std::move(h));
  }
  validate_topology(spec);
  return spec;
}

}  // namespace sdx::sim
