#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sdx::config::detail {

// A minimal YAML document tree covering the subset we accept: plain and
// quoted scalars, block/flow maps and sequences. Positions are 1-based.
struct YamlNode {
  enum class Kind { kNull, kScalar, kMap, kSeq };

  Kind kind = Kind::kNull;
  std::string scalar;
  bool quoted = false;
  int line = 0;
  int column = 0;
  std::vector<std::pair<YamlNode, YamlNode>> map;
  std::vector<YamlNode> seq;

  bool is_map() const { return kind == Kind::kMap; }
  bool is_seq() const { return kind == Kind::kSeq; }
  bool is_scalar() const { return kind == Kind::kScalar; }
  bool is_null() const { return kind == Kind::kNull; }
};

std::string_view kind_name(YamlNode::Kind kind);

// Throws ConfigError (kSyntax / kUnsupportedYaml / kDuplicateKey).
YamlNode load_yaml(std::string_view text);

}  // namespace sdx::config::detail
