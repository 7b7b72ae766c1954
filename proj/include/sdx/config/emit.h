#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "sdx/config/model.h"

namespace sdx::config {

// Canonical YAML: vlans, dps, acls; entries sorted by name, interfaces by port,
// rule order preserved; dp_id in hex; lowercase booleans. Throws ConfigError
// when cfg does not validate.
std::string emit_config(const FabricConfig& cfg);

// The `acls:` block alone, for one or more ACLs.
std::string emit_acls(const std::map<std::string, AclRules>& acls);

// Stable hash of the canonical form; used as the config fingerprint.
uint64_t config_fingerprint(const FabricConfig& cfg);

// Hash of the slice of cfg that determines the tables of one datapath: the
// datapath itself plus the VLANs and ACLs its interfaces reference.
uint64_t datapath_fingerprint(const FabricConfig& cfg, std::string_view dp);

std::string format_hex(uint64_t value);

}  // namespace sdx::config
