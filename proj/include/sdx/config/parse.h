#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sdx/config/model.h"

namespace sdx::config {

struct ParsedDocument {
  FabricConfig config;
  // Legacy spellings that were accepted (e.g. `vlangs`, dp-scoped `acls`).
  std::vector<std::string> warnings;
};

// Structural parse only: YAML syntax, schema keys and value types. Throws
// ConfigError with a parse-class code. Cross references are not checked.
ParsedDocument parse_document(std::string_view text);

// Structural parse followed by validate(); the first violation is thrown as
// ConfigError (kUnresolvedReference or kInvariant).
FabricConfig parse_config(std::string_view text);

// Integer scalars accept decimal and 0x-prefixed hex.
std::optional<uint64_t> parse_unsigned(std::string_view text);

}  // namespace sdx::config
