#include "yaml_tree.h"

#include <optional>
#include <set>
#include <sstream>

#include <yaml-cpp/eventhandler.h>
#include <yaml-cpp/exceptions.h>
#include <yaml-cpp/parser.h>

#include "sdx/config/model.h"

namespace sdx::config::detail {

std::string_view kind_name(YamlNode::Kind kind) {
  switch (kind) {
    case YamlNode::Kind::kNull: return "null";
    case YamlNode::Kind::kScalar: return "scalar";
    case YamlNode::Kind::kMap: return "map";
    case YamlNode::Kind::kSeq: return "sequence";
  }
  return "?";
}

namespace {

// yaml-cpp reports "?" for untagged plain scalars and "!" for quoted ones.
bool is_implicit_tag(const std::string& tag) { return tag.empty() || tag == "?" || tag == "!"; }

class TreeBuilder final : public YAML::EventHandler {
 public:
  void OnDocumentStart(const YAML::Mark&) override {}
  void OnDocumentEnd() override {}

  void OnNull(const YAML::Mark& mark, YAML::anchor_t anchor) override {
    reject_anchor(mark, anchor);
    YamlNode node;
    node.kind = YamlNode::Kind::kNull;
    place(std::move(node), mark);
  }

  void OnAlias(const YAML::Mark& mark, YAML::anchor_t) override {
    throw ConfigError(ErrorCode::kUnsupportedYaml, "aliases are not supported", mark.line + 1,
                      mark.column + 1);
  }

  void OnAnchor(const YAML::Mark& mark, const std::string&) override {
    throw ConfigError(ErrorCode::kUnsupportedYaml, "anchors are not supported", mark.line + 1,
                      mark.column + 1);
  }

  void OnScalar(const YAML::Mark& mark, const std::string& tag, YAML::anchor_t anchor,
                const std::string& value) override {
    reject_anchor(mark, anchor);
    reject_tag(mark, tag);
    YamlNode node;
    node.kind = YamlNode::Kind::kScalar;
    node.scalar = value;
    node.quoted = tag == "!";
    place(std::move(node), mark);
  }

  void OnSequenceStart(const YAML::Mark& mark, const std::string& tag, YAML::anchor_t anchor,
                       YAML::EmitterStyle::value) override {
    reject_anchor(mark, anchor);
    reject_tag(mark, tag);
    YamlNode node;
    node.kind = YamlNode::Kind::kSeq;
    open(std::move(node), mark);
  }

  void OnSequenceEnd() override { close(); }

  void OnMapStart(const YAML::Mark& mark, const std::string& tag, YAML::anchor_t anchor,
                  YAML::EmitterStyle::value) override {
    reject_anchor(mark, anchor);
    reject_tag(mark, tag);
    YamlNode node;
    node.kind = YamlNode::Kind::kMap;
    open(std::move(node), mark);
  }

  void OnMapEnd() override { close(); }

  bool has_root() const { return has_root_; }
  YamlNode take_root() { return std::move(root_); }

 private:
  struct Frame {
    YamlNode node;
    std::optional<YamlNode> pending_key;
    std::set<std::string> keys;
  };

  static void reject_anchor(const YAML::Mark& mark, YAML::anchor_t anchor) {
    if (anchor != YAML::NullAnchor) {
      throw ConfigError(ErrorCode::kUnsupportedYaml, "anchors are not supported", mark.line + 1,
                        mark.column + 1);
    }
  }

  static void reject_tag(const YAML::Mark& mark, const std::string& tag) {
    if (!is_implicit_tag(tag)) {
      throw ConfigError(ErrorCode::kUnsupportedYaml, "explicit tag '" + tag + "' is not supported",
                        mark.line + 1, mark.column + 1);
    }
  }

  void open(YamlNode node, const YAML::Mark& mark) {
    node.line = mark.line + 1;
    node.column = mark.column + 1;
    stack_.push_back(Frame{std::move(node), std::nullopt, {}});
  }

  void close() {
    Frame frame = std::move(stack_.back());
    stack_.pop_back();
    attach(std::move(frame.node));
  }

  void place(YamlNode node, const YAML::Mark& mark) {
    node.line = mark.line + 1;
    node.column = mark.column + 1;
    attach(std::move(node));
  }

  void attach(YamlNode node) {
    if (stack_.empty()) {
      root_ = std::move(node);
      has_root_ = true;
      return;
    }
    Frame& top = stack_.back();
    if (top.node.is_seq()) {
      top.node.seq.push_back(std::move(node));
      return;
    }
    if (!top.pending_key) {
      if (!node.is_scalar()) {
        throw ConfigError(ErrorCode::kUnsupportedYaml, "map keys must be scalars", node.line,
                          node.column);
      }
      if (!top.keys.insert(node.scalar).second) {
        throw ConfigError(ErrorCode::kDuplicateKey, "duplicate key '" + node.scalar + "'",
                          node.line, node.column);
      }
      top.pending_key = std::move(node);
      return;
    }
    top.node.map.emplace_back(std::move(*top.pending_key), std::move(node));
    top.pending_key.reset();
  }

  std::vector<Frame> stack_;
  YamlNode root_;
  bool has_root_ = false;
};

}  // namespace

YamlNode load_yaml(std::string_view text) {
  std::istringstream in{std::string(text)};
  TreeBuilder builder;
  try {
    YAML::Parser parser(in);
    if (!parser.HandleNextDocument(builder)) {
      throw ConfigError(ErrorCode::kSyntax, "empty document", 1, 1);
    }
    TreeBuilder extra;
    if (parser.HandleNextDocument(extra)) {
      throw ConfigError(ErrorCode::kUnsupportedYaml, "multiple documents are not supported");
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError(ErrorCode::kSyntax, e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  if (!builder.has_root()) throw ConfigError(ErrorCode::kSyntax, "empty document", 1, 1);
  return builder.take_root();
}

}  // namespace sdx::config::detail
