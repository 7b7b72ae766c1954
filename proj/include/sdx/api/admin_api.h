#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sdx/api/http.h"
#include "sdx/api/users.h"
#include "sdx/config/model.h"
#include "sdx/controller/controller.h"
#include "sdx/stats/process.h"
#include "sdx/stats/store.h"

namespace sdx::api {

struct EndpointStatus {
  std::string name;
  std::string address;
  int port = 0;
  bool listening = false;
};

struct ControllerStatus {
  std::vector<EndpointStatus> endpoints;
  bool controller_live = false;
  bool stats_poller_live = false;
  stats::ProcessStats process;
  std::vector<controller::SessionSummary> sessions;
  uint64_t active_fingerprint = 0;
  int64_t uptime_ms = 0;
};

nlohmann::json status_to_json(const ControllerStatus& status);

enum class Access { kAllow, kDeny, kOwnPorts };

struct Route {
  std::string pattern;
  std::vector<std::string> methods;
};

// Every route the router serves, in documentation order.
const std::vector<Route>& routes();

// The role matrix. Total over routes() and their methods; anything else is
// kDeny.
Access access(Role role, const std::string& pattern, const std::string& method);

struct AdminApiDeps {
  controller::Controller& ctl;
  stats::StatsStore& store;
  UserStore& users;
  std::function<ControllerStatus()> status;
  double default_window_s = stats::kDefaultRateWindowS;
  // Counter samples returned with /stats/ports.
  size_t recent_samples = 40;
};

// Admin surface over a staged copy of the configuration. Checks run in the
// order 401, 404 for unknown paths, 405, 403, then handler errors.
class AdminApi {
 public:
  explicit AdminApi(AdminApiDeps deps);

  Response handle(const Request& request);

  config::FabricConfig staged() const;

 private:
  struct Match;
  Response dispatch(const Match& m, const Request& req, const User& user);

  Response get_config();
  Response get_yaml(const Request& req);
  Response put_yaml(const Request& req);
  Response get_diff();
  Response apply();
  Response discard();
  Response status();
  Response stats_ports(const Request& req, const User& user);
  Response whoami(const User& user);

  Response collection(const std::string& kind, const Request& req);
  Response object(const std::string& kind, const std::vector<std::string>& ids, const Request& req);
  Response users_collection(const Request& req);
  Response users_object(const std::string& name, const Request& req);

  // Validates candidate and makes it the staged config, or returns the
  // 409/422 response explaining why not.
  std::optional<Response> stage(config::FabricConfig candidate);

  AdminApiDeps deps_;
  mutable std::mutex staged_mu_;
  config::FabricConfig staged_;
};

}  // namespace sdx::api
