#pragma once

#include <compare>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace sdx::api {

enum class Role { kAdmin, kModerator, kCustomer };

inline constexpr Role kAllRoles[] = {Role::kAdmin, Role::kModerator, Role::kCustomer};

std::string_view role_name(Role role);
std::optional<Role> parse_role(std::string_view name);

struct OwnedPort {
  std::string dp;
  uint32_t port = 0;
  auto operator<=>(const OwnedPort&) const = default;
};

struct User {
  std::string username;
  Role role = Role::kCustomer;
  std::string token;
  // Only meaningful for customers.
  std::vector<OwnedPort> ports;

  bool owns(std::string_view dp, uint32_t port) const;
  bool operator==(const User&) const = default;
};

class UserError : public std::runtime_error {
 public:
  enum class Kind { kInvalid, kConflict, kNotFound };
  UserError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

nlohmann::json user_to_json(const User& user, bool with_token);
// Throws UserError(kInvalid).
User user_from_json(const nlohmann::json& j);

// Bearer tokens mapped to users. When a path is set every mutation is
// written back to it.
class UserStore {
 public:
  UserStore() = default;
  explicit UserStore(std::vector<User> users);
  UserStore(UserStore&& other) noexcept;
  UserStore& operator=(UserStore&& other) noexcept;

  static UserStore load_file(const std::string& path);
  static UserStore from_json(const nlohmann::json& j);
  nlohmann::json to_json(bool with_tokens) const;
  void save_file(const std::string& path) const;
  void set_persist_path(std::string path);

  std::optional<User> authenticate(std::string_view token) const;
  std::optional<User> find(std::string_view username) const;
  std::vector<User> list() const;

  void add(User user);
  void replace(User user);
  void remove(std::string_view username);

 private:
  void check_locked(const User& user, const std::string* replacing) const;
  void persist_locked() const;

  mutable std::mutex mu_;
  std::vector<User> users_;
  std::string path_;
};

std::string generate_token();

}  // namespace sdx::api
