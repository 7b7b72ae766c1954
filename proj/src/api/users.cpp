#include "sdx/api/users.h"

#include <algorithm>
#include <fstream>
#include <random>

#include "sdx/config/validate.h"

namespace sdx::api {

std::string_view role_name(Role role) {
  switch (role) {
    case Role::kAdmin: return "admin";
    case Role::kModerator: return "moderator";
    case Role::kCustomer: return "customer";
  }
  return "?";
}

std::optional<Role> parse_role(std::string_view name) {
  for (Role r : kAllRoles) {
    if (role_name(r) == name) return r;
  }
  return std::nullopt;
}

bool User::owns(std::string_view dp, uint32_t port) const {
  return std::any_of(ports.begin(), ports.end(), [&](const OwnedPort& p) { return p.dp == dp && p.port == port; });
}

nlohmann::json user_to_json(const User& user, bool with_token) {
  nlohmann::json j = {{"username", user.username}, {"role", role_name(user.role)}};
  auto ports = nlohmann::json::array();
  for (const auto& p : user.ports) ports.push_back({{"dp", p.dp}, {"port", p.port}});
  j["ports"] = ports;
  if (with_token) j["token"] = user.token;
  return j;
}

User user_from_json(const nlohmann::json& j) {
  auto invalid = [](const std::string& m) { return UserError(UserError::Kind::kInvalid, m); };
  if (!j.is_object()) throw invalid("user must be an object");
  for (const auto& [k, v] : j.items()) {
    if (k != "username" && k != "role" && k != "token" && k != "ports") throw invalid("unknown field '" + k + "'");
  }
  User u;
  if (!j.contains("username") || !j["username"].is_string()) throw invalid("username must be a string");
  u.username = j["username"].get<std::string>();
  if (!j.contains("role") || !j["role"].is_string()) throw invalid("role must be a string");
  const auto role = parse_role(j["role"].get<std::string>());
  if (!role) throw invalid("unknown role '" + j["role"].get<std::string>() + "'");
  u.role = *role;
  if (j.contains("token")) {
    if (!j["token"].is_string()) throw invalid("token must be a string");
    u.token = j["token"].get<std::string>();
  }
  if (j.contains("ports")) {
    if (!j["ports"].is_array()) throw invalid("ports must be a list");
    for (const auto& p : j["ports"]) {
      if (!p.is_object() || !p.contains("dp") || !p["dp"].is_string() || !p.contains("port") ||
          !p["port"].is_number_unsigned()) {
        throw invalid("ports entries need a dp name and a port number");
      }
      u.ports.push_back({p["dp"].get<std::string>(), p["port"].get<uint32_t>()});
    }
  }
  return u;
}

UserStore::UserStore(std::vector<User> users) {
  for (auto& u : users) add(std::move(u));
}

UserStore::UserStore(UserStore&& other) noexcept {
  std::lock_guard lock(other.mu_);
  users_ = std::move(other.users_);
  path_ = std::move(other.path_);
}

UserStore& UserStore::operator=(UserStore&& other) noexcept {
  if (this != &other) {
    std::scoped_lock lock(mu_, other.mu_);
    users_ = std::move(other.users_);
    path_ = std::move(other.path_);
  }
  return *this;
}

UserStore UserStore::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UserError(UserError::Kind::kInvalid, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UserError(UserError::Kind::kInvalid, path + ": " + e.what());
  }
  return from_json(j);
}

UserStore UserStore::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("users") || !j["users"].is_array()) {
    throw UserError(UserError::Kind::kInvalid, "expected {\"users\": [...]}");
  }
  UserStore store;
  for (const auto& u : j["users"]) {
    auto user = user_from_json(u);
    if (user.token.empty()) throw UserError(UserError::Kind::kInvalid, "user '" + user.username + "' has no token");
    store.add(std::move(user));
  }
  return store;
}

nlohmann::json UserStore::to_json(bool with_tokens) const {
  std::lock_guard lock(mu_);
  auto arr = nlohmann::json::array();
  for (const auto& u : users_) arr.push_back(user_to_json(u, with_tokens));
  return {{"users", arr}};
}

void UserStore::save_file(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << to_json(true).dump(2) << "\n";
    if (!out) throw UserError(UserError::Kind::kInvalid, "cannot write " + tmp);
  }
  std::rename(tmp.c_str(), path.c_str());
}

void UserStore::set_persist_path(std::string path) {
  std::lock_guard lock(mu_);
  path_ = std::move(path);
}

std::optional<User> UserStore::authenticate(std::string_view token) const {
  if (token.empty()) return std::nullopt;
  std::lock_guard lock(mu_);
  for (const auto& u : users_) {
    if (u.token == token) return u;
  }
  return std::nullopt;
}

std::optional<User> UserStore::find(std::string_view username) const {
  std::lock_guard lock(mu_);
  for (const auto& u : users_) {
    if (u.username == username) return u;
  }
  return std::nullopt;
}

std::vector<User> UserStore::list() const {
  std::lock_guard lock(mu_);
  return users_;
}

void UserStore::check_locked(const User& user, const std::string* replacing) const {
  if (!config::is_identifier(user.username)) {
    throw UserError(UserError::Kind::kInvalid, "invalid username '" + user.username + "'");
  }
  if (user.token.size() < 8) throw UserError(UserError::Kind::kInvalid, "token must be at least 8 characters");
  if (user.role != Role::kCustomer && !user.ports.empty()) {
    throw UserError(UserError::Kind::kInvalid, "only customers own ports");
  }
  for (const auto& u : users_) {
    if (replacing && u.username == *replacing) continue;
    if (u.username == user.username) {
      throw UserError(UserError::Kind::kConflict, "user '" + user.username + "' exists");
    }
    if (u.token == user.token) throw UserError(UserError::Kind::kConflict, "token already in use");
  }
}

void UserStore::add(User user) {
  std::lock_guard lock(mu_);
  check_locked(user, nullptr);
  users_.push_back(std::move(user));
  std::sort(users_.begin(), users_.end(), [](const User& a, const User& b) { return a.username < b.username; });
  persist_locked();
}

void UserStore::replace(User user) {
  std::lock_guard lock(mu_);
  auto it = std::find_if(users_.begin(), users_.end(), [&](const User& u) { return u.username == user.username; });
  if (it == users_.end()) throw UserError(UserError::Kind::kNotFound, "no user '" + user.username + "'");
  check_locked(user, &user.username);
  const bool was_admin = it->role == Role::kAdmin;
  if (was_admin && user.role != Role::kAdmin &&
      std::count_if(users_.begin(), users_.end(), [](const User& u) { return u.role == Role::kAdmin; }) == 1) {
    throw UserError(UserError::Kind::kConflict, "cannot demote the last admin");
  }
  *it = std::move(user);
  persist_locked();
}

void UserStore::remove(std::string_view username) {
  std::lock_guard lock(mu_);
  auto it = std::find_if(users_.begin(), users_.end(), [&](const User& u) { return u.username == username; });
  if (it == users_.end()) throw UserError(UserError::Kind::kNotFound, "no user '" + std::string(username) + "'");
  if (it->role == Role::kAdmin &&
      std::count_if(users_.begin(), users_.end(), [](const User& u) { return u.role == Role::kAdmin; }) == 1) {
    throw UserError(UserError::Kind::kConflict, "cannot delete the last admin");
  }
  users_.erase(it);
  persist_locked();
}

void UserStore::persist_locked() const {
  if (path_.empty()) return;
  auto arr = nlohmann::json::array();
  for (const auto& u : users_) arr.push_back(user_to_json(u, true));
  const std::string tmp = path_ + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << nlohmann::json{{"users", arr}}.dump(2) << "\n";
  }
  std::rename(tmp.c_str(), path_.c_str());
}

std::string generate_token() {
  static const char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::random_device rd;
  std::uniform_int_distribution<int> pick(0, sizeof(kAlphabet) - 2);
  std::string out;
  for (int i = 0; i < 32; ++i) out += kAlphabet[pick(rd)];
  return out;
}

}  // namespace sdx::api
