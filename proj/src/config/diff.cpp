#include "sdx/config/diff.h"

namespace sdx::config {

std::string_view change_kind_name(ChangeKind kind) {
  switch (kind) {
    case ChangeKind::kAdded: return "added";
    case ChangeKind::kRemoved: return "removed";
    case ChangeKind::kChanged: return "changed";
  }
  return "?";
}

namespace {

// Visits the union of keys of two sorted maps.
template <typename Map, typename Fn>
void for_each_key(const Map& a, const Map& b, Fn&& fn) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      fn(ia->first, &ia->second, nullptr);
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      fn(ib->first, nullptr, &ib->second);
      ++ib;
    } else {
      fn(ia->first, &ia->second, &ib->second);
      ++ia;
      ++ib;
    }
  }
}

}  // namespace

ConfigDelta diff_config(const FabricConfig& old_cfg, const FabricConfig& new_cfg) {
  ConfigDelta delta;
  for_each_key(old_cfg.vlans, new_cfg.vlans,
               [&](const std::string& key, const VlanConfig* a, const VlanConfig* b) {
                 if (a == nullptr) {
                   delta.vlans.push_back({ChangeKind::kAdded, key, *b, false});
                 } else if (b == nullptr) {
                   delta.vlans.push_back({ChangeKind::kRemoved, key, std::nullopt, false});
                 } else if (!(*a == *b)) {
                   const bool metadata_only = a->vid == b->vid && a->name == b->name;
                   delta.vlans.push_back({ChangeKind::kChanged, key, *b, metadata_only});
                 }
               });
  for_each_key(old_cfg.dps, new_cfg.dps,
               [&](const std::string& key, const DatapathConfig* a, const DatapathConfig* b) {
                 if (a == nullptr) {
                   delta.dps.push_back({ChangeKind::kAdded, key, *b});
                   return;
                 }
                 if (b == nullptr) {
                   delta.dps.push_back({ChangeKind::kRemoved, key, std::nullopt});
                   return;
                 }
                 if (a->dp_id != b->dp_id || a->hardware != b->hardware || a->name != b->name) {
                   DatapathConfig meta = *b;
                   meta.interfaces.clear();
                   delta.dps.push_back({ChangeKind::kChanged, key, std::move(meta)});
                 }
                 for_each_key(a->interfaces, b->interfaces,
                              [&](PortNumber port, const InterfaceConfig* x, const InterfaceConfig* y) {
                                if (x == nullptr) {
                                  delta.interfaces.push_back({ChangeKind::kAdded, key, port, *y});
                                } else if (y == nullptr) {
                                  delta.interfaces.push_back(
                                      {ChangeKind::kRemoved, key, port, std::nullopt});
                                } else if (!(*x == *y)) {
                                  delta.interfaces.push_back({ChangeKind::kChanged, key, port, *y});
                                }
                              });
               });
  for_each_key(old_cfg.acls, new_cfg.acls,
               [&](const std::string& key, const AclRules* a, const AclRules* b) {
                 if (a == nullptr) {
                   delta.acls.push_back({ChangeKind::kAdded, key, *b});
                 } else if (b == nullptr) {
                   delta.acls.push_back({ChangeKind::kRemoved, key, std::nullopt});
                 } else if (!(*a == *b)) {
                   delta.acls.push_back({ChangeKind::kChanged, key, *b});
                 }
               });
  return delta;
}

FabricConfig apply_delta(const FabricConfig& old_cfg, const ConfigDelta& delta) {
  FabricConfig cfg = old_cfg;
  for (const auto& c : delta.vlans) {
    if (c.kind == ChangeKind::kRemoved) {
      cfg.vlans.erase(c.name);
    } else {
      cfg.vlans[c.name] = *c.value;
    }
  }
  for (const auto& c : delta.dps) {
    switch (c.kind) {
      case ChangeKind::kRemoved: cfg.dps.erase(c.name); break;
      case ChangeKind::kAdded: cfg.dps[c.name] = *c.value; break;
      case ChangeKind::kChanged: {
        DatapathConfig& dp = cfg.dps[c.name];
        dp.name = c.value->name;
        dp.dp_id = c.value->dp_id;
        dp.hardware = c.value->hardware;
        break;
      }
    }
  }
  for (const auto& c : delta.interfaces) {
    auto& interfaces = cfg.dps[c.dp].interfaces;
    if (c.kind == ChangeKind::kRemoved) {
      interfaces.erase(c.port);
    } else {
      interfaces[c.port] = *c.value;
    }
  }
  for (const auto& c : delta.acls) {
    if (c.kind == ChangeKind::kRemoved) {
      cfg.acls.erase(c.name);
    } else {
      cfg.acls[c.name] = *c.value;
    }
  }
  return cfg;
}

std::set<PortPath> affected_ports(const FabricConfig& old_cfg, const FabricConfig& new_cfg,
                                  const ConfigDelta& delta) {
  std::set<std::string> acls;
  for (const auto& c : delta.acls) acls.insert(c.name);
  std::set<std::string> vlans;
  for (const auto& c : delta.vlans) {
    if (!c.metadata_only) vlans.insert(c.name);
  }
  std::set<std::string> whole_dps;
  for (const auto& c : delta.dps) whole_dps.insert(c.name);

  std::set<PortPath> out;
  for (const auto& c : delta.interfaces) out.emplace(c.dp, c.port);
  for (const FabricConfig* cfg : {&old_cfg, &new_cfg}) {
    for (const auto& [dp_name, dp] : cfg->dps) {
      for (const auto& [port, iface] : dp.interfaces) {
        bool hit = whole_dps.count(dp_name) != 0 || vlans.count(iface.native_vlan) != 0;
        for (const auto& acl : iface.acls_in) hit = hit || acls.count(acl) != 0;
        if (hit) out.emplace(dp_name, port);
      }
    }
  }
  return out;
}

}  // namespace sdx::config
