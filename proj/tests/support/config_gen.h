#pragma once

// Random valid FabricConfig generator shared by property tests.

#include <random>
#include <string>

#include "sdx/config/model.h"

namespace sdx::testing {

inline config::FabricConfig random_config(std::mt19937& rng, int max_dps = 3, int max_ports = 6) {
  using namespace sdx::config;
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  FabricConfig cfg;

  const int n_vlans = pick(1, 3);
  std::vector<std::string> vlan_names;
  for (int i = 0; i < n_vlans; ++i) {
    VlanConfig v;
    v.name = "vlan" + std::to_string(i);
    v.vid = 100 + i * 10 + pick(0, 9);
    if (pick(0, 1)) v.description = "net \"" + std::to_string(pick(0, 999)) + "\"";
    vlan_names.push_back(v.name);
    cfg.vlans.emplace(v.name, v);
  }

  static const std::pair<uint16_t, uint8_t> kMatches[] = {
      {0x0800, 1}, {0x86dd, 58}, {0x0800, 6}, {0x0800, 17}, {0x86dd, 6}};
  const int n_dps = pick(1, max_dps);
  const int ports_per_dp = pick(2, max_ports);

  const int n_acls = pick(0, 4);
  std::vector<std::string> acl_names;
  for (int a = 0; a < n_acls; ++a) {
    const std::string name = "acl-" + std::to_string(a);
    AclRules rules;
    const int n_rules = pick(1, 3);
    for (int r = 0; r < n_rules; ++r) {
      AclRule rule;
      switch (pick(0, 3)) {
        case 0: break;
        case 1: rule.match.dl_type = pick(0, 1) ? 0x0800 : 0x0806; break;
        default: {
          auto [dl, proto] = kMatches[pick(0, 4)];
          rule.match.dl_type = dl;
          rule.match.ip_proto = proto;
        }
      }
      switch (pick(0, 4)) {
        case 0: rule.actions.allow = true; break;
        case 1: rule.actions.allow = false; break;
        case 2:
          rule.actions.allow = pick(0, 1) == 1;
          rule.actions.mirror = static_cast<PortNumber>(pick(1, ports_per_dp));
          break;
        case 3: rule.actions.redirect = static_cast<PortNumber>(pick(1, ports_per_dp)); break;
        default:
          rule.actions.redirect = static_cast<PortNumber>(pick(1, ports_per_dp));
          rule.actions.mirror = static_cast<PortNumber>(pick(1, ports_per_dp));
      }
      rules.push_back(rule);
    }
    acl_names.push_back(name);
    cfg.acls.emplace(name, rules);
  }

  for (int d = 0; d < n_dps; ++d) {
    DatapathConfig dp;
    dp.name = "sw" + std::to_string(d + 1);
    dp.dp_id = static_cast<uint64_t>(d + 1) * static_cast<uint64_t>(pick(1, 1000));
    if (pick(0, 1)) dp.hardware = "Open vSwitch";
    for (int p = 1; p <= ports_per_dp; ++p) {
      InterfaceConfig iface;
      if (pick(0, 3)) iface.name = "AS" + std::to_string(p);
      if (pick(0, 1)) iface.description = "port 1.0." + std::to_string(p);
      iface.native_vlan = vlan_names[static_cast<size_t>(pick(0, n_vlans - 1))];
      if (!acl_names.empty() && pick(0, 2) == 0) {
        const int n_in = pick(1, static_cast<int>(acl_names.size()));
        for (int k = 0; k < n_in; ++k) {
          iface.acls_in.push_back(acl_names[static_cast<size_t>(pick(0, n_acls - 1))]);
        }
      }
      dp.interfaces.emplace(static_cast<PortNumber>(p), iface);
    }
    cfg.dps.emplace(dp.name, dp);
  }
  // dp_ids must be unique.
  uint64_t next = 1;
  for (auto& [name, dp] : cfg.dps) dp.dp_id = dp.dp_id * 16 + next++;
  return cfg;
}

}  // namespace sdx::testing
