#include "sdx/config/model.h"

namespace sdx::config {

const DatapathConfig* FabricConfig::find_dp(std::string_view name) const {
  auto it = dps.find(std::string(name));
  return it == dps.end() ? nullptr : &it->second;
}

const DatapathConfig* FabricConfig::find_dp_by_id(uint64_t dp_id) const {
  for (const auto& [name, dp] : dps) {
    if (dp.dp_id == dp_id) return &dp;
  }
  return nullptr;
}

const InterfaceConfig* FabricConfig::find_interface(std::string_view dp, PortNumber port) const {
  const DatapathConfig* d = find_dp(dp);
  if (d == nullptr) return nullptr;
  auto it = d->interfaces.find(port);
  return it == d->interfaces.end() ? nullptr : &it->second;
}

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntax: return "syntax";
    case ErrorCode::kUnsupportedYaml: return "unsupported_yaml";
    case ErrorCode::kUnknownKey: return "unknown_key";
    case ErrorCode::kMissingSection: return "missing_section";
    case ErrorCode::kTypeMismatch: return "type_mismatch";
    case ErrorCode::kInvalidValue: return "invalid_value";
    case ErrorCode::kDuplicateKey: return "duplicate_key";
    case ErrorCode::kUnresolvedReference: return "unresolved_reference";
    case ErrorCode::kInvariant: return "invariant";
  }
  return "unknown";
}

bool is_validation_error(ErrorCode code) {
  return code == ErrorCode::kUnresolvedReference || code == ErrorCode::kInvariant;
}

namespace {

std::string with_position(const std::string& message, int line, int column) {
  if (line <= 0) return message;
  return message + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")";
}

}  // namespace

ConfigError::ConfigError(ErrorCode code, std::string message, int line, int column)
    : std::runtime_error(with_position(message, line, column)),
      code_(code),
      detail_(std::move(message)),
      line_(line),
      column_(column) {}

}  // namespace sdx::config
