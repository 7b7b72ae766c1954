#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sdx/config/model.h"

namespace sdx::config {

enum class ChangeKind { kAdded, kRemoved, kChanged };

std::string_view change_kind_name(ChangeKind kind);

struct VlanChange {
  ChangeKind kind;
  std::string name;
  std::optional<VlanConfig> value;  // absent for kRemoved
  bool metadata_only = false;        // only the description differs
};

// Datapath-level metadata (dp_id, hardware). Interface changes of a datapath
// present in both configs are listed separately as InterfaceChange entries;
// kAdded carries the full datapath including its interfaces.
struct DatapathChange {
  ChangeKind kind;
  std::string name;
  std::optional<DatapathConfig> value;
};

struct InterfaceChange {
  ChangeKind kind;
  std::string dp;
  PortNumber port = 0;
  std::optional<InterfaceConfig> value;
};

struct AclChange {
  ChangeKind kind;
  std::string name;
  std::optional<AclRules> value;
};

using PortPath = std::pair<std::string, PortNumber>;

struct ConfigDelta {
  std::vector<VlanChange> vlans;
  std::vector<DatapathChange> dps;
  std::vector<InterfaceChange> interfaces;
  std::vector<AclChange> acls;

  bool empty() const { return vlans.empty() && dps.empty() && interfaces.empty() && acls.empty(); }
  size_t size() const { return vlans.size() + dps.size() + interfaces.size() + acls.size(); }
};

ConfigDelta diff_config(const FabricConfig& old_cfg, const FabricConfig& new_cfg);

FabricConfig apply_delta(const FabricConfig& old_cfg, const ConfigDelta& delta);

// (dp, port) pairs whose compiled flows may differ between the two configs.
std::set<PortPath> affected_ports(const FabricConfig& old_cfg, const FabricConfig& new_cfg,
                                  const ConfigDelta& delta);

}  // namespace sdx::config
