#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sdx/config/model.h"

namespace sdx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitRemote = 4;

// Exit code for an admin API status: 2xx ok, 400 parse, 409/422
// validation, anything else (and no response at all) remote.
int exit_code_for_status(int status);

struct GenAclOptions {
  std::string kind;  // mirror, block, redirect or allow
  std::string name;  // defaults to kind
  std::optional<uint32_t> to;
  bool ipv4_icmp = false;
  bool ipv6_icmp = false;
  std::optional<uint16_t> dl_type;
  std::optional<uint8_t> ip_proto;
  // For mirror: also pass the original on.
  bool allow = false;
  // Append the match-everything allow-all ACL.
  bool allow_all = false;
};

// Throws std::invalid_argument for inconsistent options.
std::map<std::string, config::AclRules> generate_acls(const GenAclOptions& options);

// Entry points; argv-style args without the program name.
int sdxctl_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int sdxd_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int sdxsim_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sdx::cli
