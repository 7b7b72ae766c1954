#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "sdx/config/model.h"
#include "sdx/config/validate.h"
#include "sdx/controller/controller.h"

namespace sdx::api {

// Raised for request bodies that are well-formed JSON but have the wrong
// shape or value types.
class BodyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Field names follow the YAML schema.
nlohmann::json to_json(const config::VlanConfig& vlan);
nlohmann::json to_json(const config::DatapathConfig& dp);
nlohmann::json to_json(const std::string& dp, config::PortNumber port, const config::InterfaceConfig& iface);
nlohmann::json to_json(const std::string& name, const config::AclRules& rules);
nlohmann::json to_json(const config::FabricConfig& cfg);
nlohmann::json to_json(const config::ValidationReport& report);
nlohmann::json to_json(const controller::ApplyReport& report);
nlohmann::json to_json(const controller::SessionSummary& session);

config::VlanConfig vlan_from_json(const nlohmann::json& j);
// Interfaces are optional; absent means none.
config::DatapathConfig datapath_from_json(const nlohmann::json& j, bool* has_interfaces = nullptr);
struct InterfaceBody {
  std::string dp;
  config::PortNumber port = 0;
  config::InterfaceConfig iface;
};
InterfaceBody interface_from_json(const nlohmann::json& j);
std::pair<std::string, config::AclRules> acl_from_json(const nlohmann::json& j);

}  // namespace sdx::api
