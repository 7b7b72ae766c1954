#include <stdexcept>

#include "sdx/cli/cli.h"

namespace sdx::cli {

int exit_code_for_status(int status) {
  if (status >= 200 && status < 300) return kExitOk;
  if (status == 400) return kExitParse;
  if (status == 409 || status == 422) return kExitValidation;
  return kExitRemote;
}

std::map<std::string, config::AclRules> generate_acls(const GenAclOptions& o) {
  std::vector<config::AclMatch> matches;
  if (o.ipv4_icmp) matches.push_back({config::kEthTypeIpv4, 1});
  if (o.ipv6_icmp) matches.push_back({config::kEthTypeIpv6, 58});
  if (o.ip_proto && !o.dl_type) throw std::invalid_argument("--ip-proto needs --dl-type");
  if (o.dl_type) matches.push_back({o.dl_type, o.ip_proto});
  if (matches.empty()) matches.push_back({});

  config::AclActions actions;
  if (o.kind == "mirror") {
    if (!o.to) throw std::invalid_argument("mirror needs --to");
    actions.mirror = o.to;
    actions.allow = o.allow;
  } else if (o.kind == "redirect") {
    if (!o.to) throw std::invalid_argument("redirect needs --to");
    if (o.allow) throw std::invalid_argument("redirect cannot --allow");
    actions.redirect = o.to;
  } else if (o.kind == "block") {
    if (o.to || o.allow) throw std::invalid_argument("block takes no --to or --allow");
  } else if (o.kind == "allow") {
    if (o.to) throw std::invalid_argument("allow takes no --to");
    actions.allow = true;
  } else {
    throw std::invalid_argument("unknown ACL kind '" + o.kind + "'");
  }

  config::AclRules rules;
  for (const auto& m : matches) rules.push_back({m, actions});
  std::map<std::string, config::AclRules> out;
  out[o.name.empty() ? o.kind : o.name] = rules;
  if (o.allow_all) out["allow-all"] = {config::AclRule{{}, config::AclActions{true, std::nullopt, std::nullopt}}};
  return out;
}

}  // namespace sdx::cli
