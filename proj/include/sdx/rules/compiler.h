#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sdx/config/model.h"
#include "sdx/rules/flow_table.h"

namespace sdx::rules {

class CompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pure lowering of one datapath's slice of cfg. Throws CompileError for an
// unknown dp or an ACL action naming a port absent on it.
FlowTable compile_datapath(const config::FabricConfig& cfg, std::string_view dp);

std::map<std::string, FlowTable> compile_all(const config::FabricConfig& cfg);

FlowEntry l2_miss_entry();
FlowEntry l2_learned_entry(uint32_t in_port, const of::MacAddress& dst, uint32_t out_port);

// Ports sharing in_port's native VLAN, excluding in_port, ascending.
std::vector<uint32_t> vlan_flood_ports(const config::DatapathConfig& dp, uint32_t in_port);

// Maps a Table-0 cookie back to the ACL name and its rule index.
std::optional<std::pair<std::string, uint16_t>> resolve_acl_cookie(const config::FabricConfig& cfg,
                                                                   uint64_t cookie);

}  // namespace sdx::rules
