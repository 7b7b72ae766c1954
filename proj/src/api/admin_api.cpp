#include "sdx/api/admin_api.h"

#include <algorithm>
#include <charconv>
#include <set>

#include "sdx/api/config_json.h"
#include "sdx/config/diff.h"
#include "sdx/config/emit.h"
#include "sdx/config/parse.h"
#include "sdx/config/validate.h"
#include "sdx/rules/compiler.h"
#include "sdx/rules/plan.h"

namespace sdx::api {

using nlohmann::json;

std::string Request::header(const std::string& name) const {
  auto it = headers.find(name);
  return it == headers.end() ? std::string() : it->second;
}

Response Response::json(int status, const nlohmann::json& body) {
  Response r;
  r.status = status;
  r.body = body.dump(2);
  r.body += "\n";
  return r;
}

Response Response::error(int status, const std::string& message) {
  return json(status, {{"error", message}});
}

Response Response::empty(int status) {
  Response r;
  r.status = status;
  r.content_type.clear();
  return r;
}

nlohmann::json status_to_json(const ControllerStatus& s) {
  json endpoints = json::array();
  for (const auto& e : s.endpoints) {
    endpoints.push_back({{"name", e.name}, {"address", e.address}, {"port", e.port}, {"listening", e.listening}});
  }
  json sessions = json::array();
  for (const auto& x : s.sessions) sessions.push_back(to_json(x));
  return {{"endpoints", endpoints},
          {"roles", {{"controller", s.controller_live}, {"stats_poller", s.stats_poller_live}}},
          {"cpu_percent", s.process.cpu_percent},
          {"resident_memory_bytes", s.process.resident_bytes},
          {"virtual_memory_bytes", s.process.virtual_bytes},
          {"sessions", sessions},
          {"active_fingerprint", config::format_hex(s.active_fingerprint)},
          {"uptime_ms", s.uptime_ms}};
}

const std::vector<Route>& routes() {
  static const std::vector<Route> kRoutes = {
      {"/whoami", {"GET"}},
      {"/status", {"GET"}},
      {"/stats/ports", {"GET"}},
      {"/config", {"GET"}},
      {"/config/yaml", {"GET", "PUT"}},
      {"/config/diff", {"GET"}},
      {"/config/apply", {"POST"}},
      {"/config/discard", {"POST"}},
      {"/vlans", {"GET", "POST"}},
      {"/vlans/{name}", {"GET", "PUT", "DELETE"}},
      {"/datapaths", {"GET", "POST"}},
      {"/datapaths/{name}", {"GET", "PUT", "DELETE"}},
      {"/interfaces", {"GET", "POST"}},
      {"/interfaces/{dp}/{port}", {"GET", "PUT", "DELETE"}},
      {"/acls", {"GET", "POST"}},
      {"/acls/{name}", {"GET", "PUT", "DELETE"}},
      {"/users", {"GET", "POST"}},
      {"/users/{name}", {"GET", "PUT", "DELETE"}},
  };
  return kRoutes;
}

Access access(Role role, const std::string& pattern, const std::string& method) {
  const auto& all = routes();
  auto it = std::find_if(all.begin(), all.end(), [&](const Route& r) { return r.pattern == pattern; });
  if (it == all.end() || std::find(it->methods.begin(), it->methods.end(), method) == it->methods.end()) {
    return Access::kDeny;
  }
  switch (role) {
    case Role::kAdmin:
      return Access::kAllow;
    case Role::kModerator:
      if (method != "GET" || pattern.rfind("/users", 0) == 0) return Access::kDeny;
      return Access::kAllow;
    case Role::kCustomer:
      if (pattern == "/whoami") return Access::kAllow;
      if (pattern == "/stats/ports") return Access::kOwnPorts;
      return Access::kDeny;
  }
  return Access::kDeny;
}

struct AdminApi::Match {
  const Route* route = nullptr;
  std::vector<std::string> params;
};

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '/') {
      ++i;
      continue;
    }
    const size_t j = path.find('/', i);
    out.push_back(path.substr(i, j == std::string::npos ? std::string::npos : j - i));
    if (j == std::string::npos) break;
    i = j;
  }
  return out;
}

std::optional<uint32_t> parse_port(const std::string& s) {
  const auto v = config::parse_unsigned(s);
  if (!v || *v > 0xffffffffu) return std::nullopt;
  return static_cast<uint32_t>(*v);
}

std::optional<json> parse_body(const Request& req, Response& error) {
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    error = Response::error(400, std::string("malformed JSON: ") + e.what());
    return std::nullopt;
  }
}

std::optional<uint64_t> safe_fingerprint(const config::FabricConfig& cfg) {
  try {
    return config::config_fingerprint(cfg);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

json rates_json(const stats::RateSample& r) {
  auto v = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  return {{"bits_in_per_sec", v(r.bits_in_per_sec)},     {"bits_out_per_sec", v(r.bits_out_per_sec)},
          {"pkts_in_per_sec", v(r.pkts_in_per_sec)},     {"pkts_out_per_sec", v(r.pkts_out_per_sec)},
          {"drops_in_per_sec", v(r.drops_in_per_sec)},   {"drops_out_per_sec", v(r.drops_out_per_sec)},
          {"errors_in_per_sec", v(r.errors_in_per_sec)}, {"errors_out_per_sec", v(r.errors_out_per_sec)},
          {"window_s", r.window_s}};
}

int status_for(const UserError& e) {
  switch (e.kind()) {
    case UserError::Kind::kInvalid: return 422;
    case UserError::Kind::kConflict: return 409;
    case UserError::Kind::kNotFound: return 404;
  }
  return 422;
}

}  // namespace

AdminApi::AdminApi(AdminApiDeps deps) : deps_(std::move(deps)), staged_(*deps_.ctl.active_config()) {}

config::FabricConfig AdminApi::staged() const {
  std::lock_guard lock(staged_mu_);
  return staged_;
}

Response AdminApi::handle(const Request& req) {
  const std::string auth = req.header("authorization");
  std::optional<User> user;
  if (auth.rfind("Bearer ", 0) == 0) user = deps_.users.authenticate(auth.substr(7));
  if (!user) {
    auto r = Response::error(401, auth.empty() ? "missing bearer token" : "invalid bearer token");
    r.headers["WWW-Authenticate"] = "Bearer";
    return r;
  }

  const auto segments = split_path(req.path);
  Match match;
  for (const auto& route : routes()) {
    const auto pattern = split_path(route.pattern);
    if (pattern.size() != segments.size()) continue;
    std::vector<std::string> params;
    bool ok = true;
    for (size_t i = 0; i < pattern.size() && ok; ++i) {
      if (pattern[i].front() == '{') {
        params.push_back(segments[i]);
      } else if (pattern[i] != segments[i]) {
        ok = false;
      }
    }
    if (ok) {
      match.route = &route;
      match.params = std::move(params);
      break;
    }
  }
  if (!match.route) return Response::error(404, "no such endpoint: " + req.path);
  const auto& methods = match.route->methods;
  if (std::find(methods.begin(), methods.end(), req.method) == methods.end()) {
    auto r = Response::error(405, "method " + req.method + " not allowed on " + match.route->pattern);
    std::string allow;
    for (const auto& m : methods) allow += (allow.empty() ? "" : ", ") + m;
    r.headers["Allow"] = allow;
    return r;
  }
  if (access(user->role, match.route->pattern, req.method) == Access::kDeny) {
    return Response::error(403, std::string("role ") + std::string(role_name(user->role)) + " may not " +
                                    req.method + " " + match.route->pattern);
  }
  try {
    return dispatch(match, req, *user);
  } catch (const BodyError& e) {
    return Response::error(422, e.what());
  } catch (const UserError& e) {
    return Response::error(status_for(e), e.what());
  } catch (const config::ConfigError& e) {
    return Response::error(config::is_validation_error(e.code()) ? 422 : 400, e.what());
  }
}

Response AdminApi::dispatch(const Match& m, const Request& req, const User& user) {
  const auto& p = m.route->pattern;
  if (p == "/whoami") return whoami(user);
  if (p == "/status") return status();
  if (p == "/stats/ports") return stats_ports(req, user);
  if (p == "/config") return get_config();
  if (p == "/config/yaml") return req.method == "GET" ? get_yaml(req) : put_yaml(req);
  if (p == "/config/diff") return get_diff();
  if (p == "/config/apply") return apply();
  if (p == "/config/discard") return discard();
  if (p == "/users") return users_collection(req);
  if (p == "/users/{name}") return users_object(m.params[0], req);
  const auto kind = split_path(p).front();
  if (m.params.empty()) return collection(kind, req);
  return object(kind, m.params, req);
}

Response AdminApi::whoami(const User& user) { return Response::json(200, user_to_json(user, false)); }

Response AdminApi::status() {
  if (!deps_.status) return Response::error(503, "status unavailable");
  return Response::json(200, status_to_json(deps_.status()));
}

Response AdminApi::get_config() {
  const auto staged = this->staged();
  const auto active = deps_.ctl.active_config();
  const auto sf = safe_fingerprint(staged);
  const auto af = safe_fingerprint(*active);
  auto hex = [](const std::optional<uint64_t>& f) { return f ? json(config::format_hex(*f)) : json(nullptr); };
  return Response::json(200, {{"staged", to_json(staged)},
                              {"active", to_json(*active)},
                              {"staged_fingerprint", hex(sf)},
                              {"active_fingerprint", hex(af)},
                              {"dirty", !(staged == *active)},
                              {"violations", to_json(config::validate(staged))}});
}

Response AdminApi::get_yaml(const Request& req) {
  auto it = req.query.find("version");
  const std::string version = it == req.query.end() ? "staged" : it->second;
  if (version != "staged" && version != "active") return Response::error(400, "version must be staged or active");
  const auto cfg = version == "active" ? *deps_.ctl.active_config() : staged();
  Response r;
  r.content_type = "application/yaml";
  r.body = config::emit_config(cfg);
  return r;
}

Response AdminApi::put_yaml(const Request& req) {
  config::ParsedDocument doc;
  try {
    doc = config::parse_document(req.body);
  } catch (const config::ConfigError& e) {
    return Response::json(400, {{"error", e.what()},
                                {"code", config::error_code_name(e.code())},
                                {"line", e.line()},
                                {"column", e.column()}});
  }
  if (auto err = stage(doc.config)) return *err;
  return Response::json(200, {{"staged_fingerprint", config::format_hex(config::config_fingerprint(doc.config))},
                              {"warnings", doc.warnings}});
}

Response AdminApi::get_diff() {
  const auto staged = this->staged();
  const auto active = deps_.ctl.active_config();
  const auto delta = config::diff_config(*active, staged);
  json changes = json::array();
  auto kind = [](config::ChangeKind k) { return config::change_kind_name(k); };
  for (const auto& c : delta.vlans) changes.push_back({{"kind", kind(c.kind)}, {"object", "vlan"}, {"name", c.name}});
  for (const auto& c : delta.dps) changes.push_back({{"kind", kind(c.kind)}, {"object", "datapath"}, {"name", c.name}});
  for (const auto& c : delta.interfaces) {
    changes.push_back({{"kind", kind(c.kind)},
                       {"object", "interface"},
                       {"name", c.dp + "/" + std::to_string(c.port)}});
  }
  for (const auto& c : delta.acls) changes.push_back({{"kind", kind(c.kind)}, {"object", "acl"}, {"name", c.name}});

  json dps = json::array();
  std::set<std::string> names;
  for (const auto& [n, d] : active->dps) names.insert(n);
  for (const auto& [n, d] : staged.dps) names.insert(n);
  for (const auto& name : names) {
    const auto before = active->dps.count(name) ? rules::compile_datapath(*active, name) : rules::FlowTable{};
    const auto after = staged.dps.count(name) ? rules::compile_datapath(staged, name) : rules::FlowTable{};
    const auto plan = rules::plan_update(before, after);
    dps.push_back({{"dp", name},
                   {"added", plan.count(of::FlowModCommand::kAdd)},
                   {"removed", plan.count(of::FlowModCommand::kDeleteStrict)}});
  }
  return Response::json(200, {{"changes", changes}, {"dps", dps}});
}

Response AdminApi::apply() {
  const auto staged = this->staged();
  const auto report = config::validate(staged);
  if (!report.ok()) {
    return Response::json(422, {{"error", report.violations.front().message}, {"violations", to_json(report)}});
  }
  const auto result = deps_.ctl.apply_config(staged);
  return Response::json(result.ok ? 200 : 502, to_json(result));
}

Response AdminApi::discard() {
  const auto active = deps_.ctl.active_config();
  std::lock_guard lock(staged_mu_);
  staged_ = *active;
  return Response::json(200, {{"staged_fingerprint", config::format_hex(config::config_fingerprint(staged_))}});
}

std::optional<Response> AdminApi::stage(config::FabricConfig candidate) {
  config::ValidateOptions opt;
  opt.require_nonempty = false;
  const auto report = config::validate(candidate, opt);
  if (!report.ok()) {
    const bool integrity = std::any_of(report.violations.begin(), report.violations.end(), [](const auto& v) {
      return v.kind == config::ErrorCode::kUnresolvedReference;
    });
    return Response::json(integrity ? 409 : 422,
                          {{"error", report.violations.front().message}, {"violations", to_json(report)}});
  }
  std::lock_guard lock(staged_mu_);
  staged_ = std::move(candidate);
  return std::nullopt;
}

Response AdminApi::collection(const std::string& kind, const Request& req) {
  const auto staged = this->staged();
  const auto active = deps_.ctl.active_config();
  if (req.method == "GET") {
    auto list = [&](const config::FabricConfig& cfg) {
      json arr = json::array();
      if (kind == "vlans") {
        for (const auto& [n, v] : cfg.vlans) arr.push_back(to_json(v));
      } else if (kind == "datapaths") {
        for (const auto& [n, d] : cfg.dps) arr.push_back(to_json(d));
      } else if (kind == "interfaces") {
        for (const auto& [n, d] : cfg.dps) {
          for (const auto& [port, iface] : d.interfaces) arr.push_back(to_json(n, port, iface));
        }
      } else {
        for (const auto& [n, a] : cfg.acls) arr.push_back(to_json(n, a));
      }
      return arr;
    };
    return Response::json(200, {{"staged", list(staged)}, {"active", list(*active)}});
  }

  Response err;
  const auto body = parse_body(req, err);
  if (!body) return err;
  auto candidate = staged;
  json created;
  if (kind == "vlans") {
    auto v = vlan_from_json(*body);
    if (candidate.vlans.count(v.name)) return Response::error(409, "vlan '" + v.name + "' exists");
    created = to_json(v);
    candidate.vlans[v.name] = v;
  } else if (kind == "datapaths") {
    auto d = datapath_from_json(*body);
    if (candidate.dps.count(d.name)) return Response::error(409, "datapath '" + d.name + "' exists");
    created = to_json(d);
    candidate.dps[d.name] = d;
  } else if (kind == "interfaces") {
    auto b = interface_from_json(*body);
    auto it = candidate.dps.find(b.dp);
    if (it == candidate.dps.end()) return Response::error(409, "unknown datapath '" + b.dp + "'");
    if (it->second.interfaces.count(b.port)) {
      return Response::error(409, "interface " + b.dp + "/" + std::to_string(b.port) + " exists");
    }
    created = to_json(b.dp, b.port, b.iface);
    it->second.interfaces[b.port] = b.iface;
  } else {
    auto [name, rules] = acl_from_json(*body);
    if (candidate.acls.count(name)) return Response::error(409, "acl '" + name + "' exists");
    created = to_json(name, rules);
    candidate.acls[name] = rules;
  }
  if (auto e = stage(std::move(candidate))) return *e;
  return Response::json(201, created);
}

Response AdminApi::object(const std::string& kind, const std::vector<std::string>& ids, const Request& req) {
  auto candidate = staged();
  const auto active = deps_.ctl.active_config();
  const std::string& name = ids[0];

  std::optional<uint32_t> port;
  if (kind == "interfaces") {
    port = parse_port(ids[1]);
    if (!port) return Response::error(404, "no interface " + name + "/" + ids[1]);
  }
  auto lookup = [&](const config::FabricConfig& cfg) -> std::optional<json> {
    if (kind == "vlans") {
      auto it = cfg.vlans.find(name);
      if (it != cfg.vlans.end()) return to_json(it->second);
    } else if (kind == "datapaths") {
      auto it = cfg.dps.find(name);
      if (it != cfg.dps.end()) return to_json(it->second);
    } else if (kind == "interfaces") {
      if (const auto* iface = cfg.find_interface(name, *port)) return to_json(name, *port, *iface);
    } else {
      auto it = cfg.acls.find(name);
      if (it != cfg.acls.end()) return to_json(name, it->second);
    }
    return std::nullopt;
  };
  const auto in_staged = lookup(candidate);
  const std::string label = kind == "interfaces" ? name + "/" + ids[1] : name;

  if (req.method == "GET") {
    const auto in_active = lookup(*active);
    if (!in_staged && !in_active) return Response::error(404, "no " + kind + " entry '" + label + "'");
    return Response::json(200, {{"staged", in_staged ? *in_staged : json(nullptr)},
                                {"active", in_active ? *in_active : json(nullptr)}});
  }
  if (!in_staged) return Response::error(404, "no staged " + kind + " entry '" + label + "'");

  if (req.method == "DELETE") {
    if (kind == "vlans") candidate.vlans.erase(name);
    else if (kind == "datapaths") candidate.dps.erase(name);
    else if (kind == "interfaces") candidate.dps.at(name).interfaces.erase(*port);
    else candidate.acls.erase(name);
    if (auto e = stage(std::move(candidate))) return *e;
    return Response::empty(204);
  }

  Response err;
  auto body = parse_body(req, err);
  if (!body) return err;
  if (!body->is_object()) return Response::error(422, "body must be an object");
  auto pin = [&](const char* key, const json& value) {
    if (body->contains(key) && (*body)[key] != value) {
      throw BodyError(std::string("field '") + key + "' does not match the path");
    }
    (*body)[key] = value;
  };
  json updated;
  if (kind == "vlans") {
    pin("name", name);
    auto v = vlan_from_json(*body);
    updated = to_json(v);
    candidate.vlans[name] = v;
  } else if (kind == "datapaths") {
    pin("name", name);
    bool has_interfaces = false;
    auto d = datapath_from_json(*body, &has_interfaces);
    if (!has_interfaces) d.interfaces = candidate.dps.at(name).interfaces;
    updated = to_json(d);
    candidate.dps[name] = d;
  } else if (kind == "interfaces") {
    pin("dp", name);
    if (body->contains("port")) {
      const auto& v = (*body)["port"];
      const auto given = v.is_number_unsigned() ? std::optional<uint64_t>(v.get<uint64_t>())
                         : v.is_string()        ? config::parse_unsigned(v.get<std::string>())
                                                : std::nullopt;
      if (given != std::optional<uint64_t>(*port)) throw BodyError("field 'port' does not match the path");
    }
    (*body)["port"] = *port;
    auto b = interface_from_json(*body);
    updated = to_json(name, *port, b.iface);
    candidate.dps.at(name).interfaces[*port] = b.iface;
  } else {
    pin("name", name);
    auto [n, rules] = acl_from_json(*body);
    updated = to_json(n, rules);
    candidate.acls[name] = rules;
  }
  if (auto e = stage(std::move(candidate))) return *e;
  return Response::json(200, updated);
}

Response AdminApi::users_collection(const Request& req) {
  if (req.method == "GET") return Response::json(200, deps_.users.to_json(false));
  Response err;
  const auto body = parse_body(req, err);
  if (!body) return err;
  auto user = user_from_json(*body);
  if (user.token.empty()) user.token = generate_token();
  deps_.users.add(user);
  return Response::json(201, user_to_json(user, true));
}

Response AdminApi::users_object(const std::string& name, const Request& req) {
  const auto existing = deps_.users.find(name);
  if (!existing) return Response::error(404, "no user '" + name + "'");
  if (req.method == "GET") return Response::json(200, user_to_json(*existing, false));
  if (req.method == "DELETE") {
    deps_.users.remove(name);
    return Response::empty(204);
  }
  Response err;
  auto body = parse_body(req, err);
  if (!body) return err;
  if (!body->is_object()) return Response::error(422, "body must be an object");
  if (body->contains("username") && (*body)["username"] != name) {
    return Response::error(422, "field 'username' does not match the path");
  }
  (*body)["username"] = name;
  auto user = user_from_json(*body);
  if (user.token.empty()) user.token = existing->token;
  deps_.users.replace(user);
  return Response::json(200, user_to_json(user, false));
}

Response AdminApi::stats_ports(const Request& req, const User& user) {
  auto q = [&](const char* k) -> std::optional<std::string> {
    auto it = req.query.find(k);
    if (it == req.query.end()) return std::nullopt;
    return it->second;
  };
  const bool customer = user.role == Role::kCustomer;
  const auto dp = q("dp");
  const auto port_text = q("port");
  if (customer && (dp || port_text)) {
    const auto p = port_text ? parse_port(*port_text) : std::nullopt;
    if (!dp || !p || !user.owns(*dp, *p)) return Response::error(403, "port is not owned by " + user.username);
  }
  double window = deps_.default_window_s;
  if (auto w = q("window")) {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(w->data(), w->data() + w->size(), v);
    if (ec != std::errc() || ptr != w->data() + w->size() || !(v > 0)) {
      return Response::error(400, "window must be a positive number of seconds");
    }
    window = v;
  }
  const auto active = deps_.ctl.active_config();
  auto port_rates = [&](const stats::PortKey& key) -> std::optional<stats::RateSample> {
    const auto s = deps_.store.series(key, stats::Counter::kRxBytes);
    if (s.empty()) return std::nullopt;
    auto r = stats::compute_rates(deps_.store, key, window, s.back().t_ms);
    if (!r.bits_in_per_sec) return std::nullopt;
    return r;
  };

  if (!dp && !port_text) {
    std::set<stats::PortKey> keys;
    for (const auto& k : deps_.store.ports()) keys.insert(k);
    for (const auto& [n, d] : active->dps) {
      for (const auto& [p, i] : d.interfaces) keys.insert({n, p});
    }
    json arr = json::array();
    for (const auto& k : keys) {
      if (customer && !user.owns(k.dp, k.port)) continue;
      const auto r = port_rates(k);
      arr.push_back({{"dp", k.dp}, {"port", k.port}, {"rates", r ? rates_json(*r) : json(nullptr)}});
    }
    return Response::json(200, {{"window_s", window}, {"ports", arr}});
  }
  if (!dp || !port_text) return Response::error(400, "dp and port go together");
  const auto port = parse_port(*port_text);
  if (!port) return Response::error(400, "port must be a number");

  const stats::PortKey key{*dp, *port};
  const auto samples = deps_.store.series(key, stats::Counter::kRxBytes);
  if (!active->find_interface(*dp, *port) && samples.empty()) {
    return Response::error(404, "no port " + *dp + "/" + *port_text);
  }
  const auto rates = port_rates(key);
  if (!rates) return Response::empty(204);

  json rows = json::array();
  std::vector<std::vector<stats::Sample>> all;
  for (auto c : stats::kAllCounters) all.push_back(deps_.store.series(key, c));
  const size_t n = all[0].size();
  const size_t first = n > deps_.recent_samples ? n - deps_.recent_samples : 0;
  for (size_t i = first; i < n; ++i) {
    json row = {{"t_ms", all[0][i].t_ms}};
    for (size_t c = 0; c < all.size(); ++c) {
      if (i < all[c].size()) row[std::string(stats::counter_name(stats::kAllCounters[c]))] = all[c][i].value;
    }
    rows.push_back(row);
  }
  return Response::json(200, {{"dp", *dp}, {"port", *port}, {"window_s", window}, {"rates", rates_json(*rates)},
                              {"samples", rows}});
}

}  // namespace sdx::api
