#pragma once

// Admin API on a manual clock, plus the role matrix as published in
// docs/api.md and helpers to exercise every (role, path, verb) cell.

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sdx/api/admin_api.h"
#include "sdx/config/parse.h"
#include "sdx/stats/store.h"
#include "support/fixtures.h"

namespace sdx::testing {

inline config::FabricConfig stock_config() { return config::parse_config(stock_text()); }

inline api::UserStore dev_users() { return api::UserStore::load_file(std::string(SDX_CONFIG_DIR) + "/users.json"); }

inline const std::map<api::Role, std::string>& role_tokens() {
  static const std::map<api::Role, std::string> tokens = {
      {api::Role::kAdmin, "admin-dev-token"},
      {api::Role::kModerator, "noc-dev-token"},
      {api::Role::kCustomer, "as2-dev-token"},
  };
  return tokens;
}

inline const std::vector<std::string> kVerbs = {"GET", "POST", "PUT", "DELETE", "PATCH"};

struct MatrixRow {
  std::string method;
  std::string pattern;
  // Y allowed, N forbidden, O own ports only.
  std::map<api::Role, char> grant;
};

// Rows of the "Role matrix" table in docs/api.md.
inline std::vector<MatrixRow> documented_matrix() {
  std::ifstream in(std::string(SDX_DOCS_DIR) + "/api.md");
  std::vector<MatrixRow> rows;
  std::string line;
  bool in_table = false;
  while (std::getline(in, line)) {
    if (line.rfind("| Method | Path |", 0) == 0) {
      in_table = true;
      continue;
    }
    if (!in_table) continue;
    if (line.empty() || line[0] != '|') break;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '|')) {
      const auto b = cell.find_first_not_of(' ');
      const auto e = cell.find_last_not_of(' ');
      if (b != std::string::npos) cells.push_back(cell.substr(b, e - b + 1));
    }
    if (cells.size() != 5 || cells[0].rfind("---", 0) == 0) continue;
    rows.push_back({cells[0],
                    cells[1],
                    {{api::Role::kAdmin, cells[2][0]},
                     {api::Role::kModerator, cells[3][0]},
                     {api::Role::kCustomer, cells[4][0]}}});
  }
  return rows;
}

inline api::Access expected_access(char grant) {
  return grant == 'Y' ? api::Access::kAllow : grant == 'O' ? api::Access::kOwnPorts : api::Access::kDeny;
}

struct ApiFixture {
  std::shared_ptr<ManualClock> clock = std::make_shared<ManualClock>();
  controller::Controller ctl;
  stats::StatsStore store;
  api::UserStore user_store = dev_users();
  api::AdminApi api;

  explicit ApiFixture(config::FabricConfig cfg = stock_config())
      : ctl(std::move(cfg), clock), api(api::AdminApiDeps{ctl, store, user_store, status_fn()}) {}

  static std::function<api::ControllerStatus()> status_fn() {
    return [] {
      api::ControllerStatus s;
      s.endpoints = {{"control", "127.0.0.1", 6653, true}, {"metrics", "127.0.0.1", 9302, true},
                     {"admin", "127.0.0.1", 8080, true}};
      return s;
    };
  }

  api::Response call(const std::string& method, const std::string& path,
                     const std::string& token = "admin-dev-token", const std::string& body = "",
                     std::map<std::string, std::string> query = {}) {
    api::Request r;
    r.method = method;
    r.path = path;
    r.query = std::move(query);
    if (!token.empty()) r.headers["authorization"] = "Bearer " + token;
    r.body = body;
    return api.handle(r);
  }
};

// A concrete path for a route pattern, naming objects present in stock.
inline std::string concrete_path(const std::string& pattern) {
  std::string p = pattern;
  auto sub = [&](const std::string& from, const std::string& to) {
    auto i = p.find(from);
    if (i != std::string::npos) p.replace(i, from.size(), to);
  };
  if (p.rfind("/vlans", 0) == 0) sub("{name}", "office");
  if (p.rfind("/datapaths", 0) == 0) sub("{name}", "sw1");
  if (p.rfind("/acls", 0) == 0) sub("{name}", "allow-all");
  if (p.rfind("/users", 0) == 0) sub("{name}", "as1");
  sub("{dp}", "sw1");
  sub("{port}", "3");
  return p;
}

// A body that the handler accepts for (method, pattern).
inline std::string sample_body(const std::string& method, const std::string& pattern) {
  if (method == "GET" || method == "DELETE") return "";
  if (pattern == "/vlans") return R"({"name": "transit", "vid": 200})";
  if (pattern == "/vlans/{name}") return R"({"vid": 100, "description": "Research network"})";
  if (pattern == "/datapaths") return R"({"name": "sw9", "dp_id": 9})";
  if (pattern == "/datapaths/{name}") return R"({"dp_id": 1, "hardware": "Open vSwitch"})";
  if (pattern == "/interfaces") return R"({"dp": "sw1", "port": 7, "native_vlan": "office"})";
  if (pattern == "/interfaces/{dp}/{port}") return R"({"name": "AS3", "native_vlan": "office"})";
  if (pattern == "/acls") return R"({"name": "drop-all", "rules": [{"actions": {"allow": false}}]})";
  if (pattern == "/acls/{name}") return R"({"rules": [{"actions": {"allow": true}}]})";
  if (pattern == "/users") return R"({"username": "as3", "role": "customer"})";
  if (pattern == "/users/{name}") return R"({"role": "customer", "ports": [{"dp": "sw1", "port": 1}]})";
  if (pattern == "/config/yaml") return stock_text();
  return "";
}

inline std::map<std::string, std::string> sample_query(const std::string& pattern) {
  if (pattern == "/stats/ports") return {{"dp", "sw1"}, {"port", "2"}};
  return {};
}

// Whether an HTTP status is what the matrix cell promises. '-' means the
// verb is not served on the path.
inline bool status_matches_grant(char grant, int status) {
  if (grant == '-') return status == 405;
  if (grant == 'N') return status == 403;
  return status != 401 && status != 403 && status != 405 && status < 500;
}

}  // namespace sdx::testing
