#pragma once

#include <string>
#include <vector>

#include "sdx/config/model.h"

namespace sdx::config {

struct Violation {
  // Machine-readable, e.g. "duplicate_vid", "unresolved_acl".
  std::string code;
  // Dotted location, e.g. "dps.sw1.interfaces.3.acls_in".
  std::string path;
  std::string message;
  // kUnresolvedReference or kInvariant.
  ErrorCode kind = ErrorCode::kInvariant;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(std::string_view code) const;
};

struct ValidateOptions {
  // Staged configs built incrementally through the admin API may be empty
  // while still being referentially sound.
  bool require_nonempty = true;
};

ValidationReport validate(const FabricConfig& cfg, ValidateOptions options = {});

// Throws ConfigError for the first violation, if any.
void require_valid(const FabricConfig& cfg, ValidateOptions options = {});

bool is_identifier(std::string_view name);

}  // namespace sdx::config
