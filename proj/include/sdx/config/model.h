#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sdx::config {

struct VlanConfig {
  std::string name;
  int64_t vid = 0;
  std::string description;

  bool operator==(const VlanConfig&) const = default;
};

struct InterfaceConfig {
  std::string name;
  std::string description;
  std::string native_vlan;
  // First-match order.
  std::vector<std::string> acls_in;

  bool operator==(const InterfaceConfig&) const = default;
};

using PortNumber = uint32_t;

struct DatapathConfig {
  std::string name;
  uint64_t dp_id = 0;
  std::string hardware;
  std::map<PortNumber, InterfaceConfig> interfaces;

  bool operator==(const DatapathConfig&) const = default;
};

struct AclMatch {
  std::optional<uint16_t> dl_type;
  std::optional<uint8_t> ip_proto;

  bool empty() const { return !dl_type && !ip_proto; }
  bool operator==(const AclMatch&) const = default;
};

struct AclActions {
  bool allow = false;
  std::optional<PortNumber> mirror;
  std::optional<PortNumber> redirect;

  bool operator==(const AclActions&) const = default;
};

struct AclRule {
  AclMatch match;
  AclActions actions;

  bool operator==(const AclRule&) const = default;
};

using AclRules = std::vector<AclRule>;

// The whole peering/ACL intent. Maps are keyed by name so iteration order is
// the canonical (sorted) order used by the emitter and the compiler.
struct FabricConfig {
  std::map<std::string, VlanConfig> vlans;
  std::map<std::string, DatapathConfig> dps;
  std::map<std::string, AclRules> acls;

  bool operator==(const FabricConfig&) const = default;

  const DatapathConfig* find_dp(std::string_view name) const;
  const DatapathConfig* find_dp_by_id(uint64_t dp_id) const;
  const InterfaceConfig* find_interface(std::string_view dp, PortNumber port) const;
};

constexpr uint16_t kEthTypeIpv4 = 0x0800;
constexpr uint16_t kEthTypeIpv6 = 0x86dd;
constexpr uint16_t kEthTypeArp = 0x0806;
constexpr PortNumber kMaxPortNumber = 0xffffff00;

enum class ErrorCode {
  kSyntax,
  kUnsupportedYaml,
  kUnknownKey,
  kMissingSection,
  kTypeMismatch,
  kInvalidValue,
  kDuplicateKey,
  kUnresolvedReference,
  kInvariant,
};

std::string_view error_code_name(ErrorCode code);

// Parse errors (exit code 2) are everything up to kDuplicateKey; the last two
// are validation failures (exit code 3).
bool is_validation_error(ErrorCode code);

class ConfigError : public std::runtime_error {
 public:
  ConfigError(ErrorCode code, std::string message, int line = 0, int column = 0);

  ErrorCode code() const { return code_; }
  // 1-based; 0 when the error has no source position.
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
  int line_;
  int column_;
};

}  // namespace sdx::config
