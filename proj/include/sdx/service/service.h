#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "sdx/api/admin_api.h"
#include "sdx/api/http_server.h"
#include "sdx/api/users.h"
#include "sdx/common/clock.h"
#include "sdx/controller/controller.h"
#include "sdx/net/tcp.h"
#include "sdx/stats/poller.h"
#include "sdx/stats/process.h"
#include "sdx/stats/store.h"

namespace sdx::service {

inline constexpr int kDefaultControlPort = 6653;
inline constexpr int kDefaultMetricsPort = 9302;
inline constexpr int kDefaultAdminPort = 8080;
// A role counts as live while its heartbeat is younger than this.
inline constexpr int64_t kLivenessWindowMs = 5000;

struct ServiceOptions {
  std::string bind_address = "0.0.0.0";
  int control_port = kDefaultControlPort;
  int metrics_port = kDefaultMetricsPort;
  int admin_port = kDefaultAdminPort;
  // Served at /ui on the admin port when the directory exists.
  std::string ui_dir;
  int64_t stats_interval_ms = 15000;
  double rate_window_s = stats::kDefaultRateWindowS;
  int64_t tick_ms = 1000;
  controller::ControllerOptions controller;
};

// SDX_CONTROL_PORT, SDX_METRICS_PORT and SDX_ADMIN_PORT override the ports.
// Throws std::invalid_argument for a malformed value.
ServiceOptions apply_env(ServiceOptions options);

// The daemon: controller, stats poller, metrics and admin endpoints in one
// process.
class Service {
 public:
  Service(config::FabricConfig cfg, api::UserStore users, ServiceOptions options,
          std::shared_ptr<Clock> clock = steady_clock());
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds all three endpoints and starts the background loops. Throws
  // net::NetError or api::HttpError when an endpoint cannot be bound; any
  // endpoint already bound is released again.
  void start();
  void stop();

  api::ControllerStatus status();
  std::string render_metrics();

  controller::Controller& controller() { return ctl_; }
  stats::StatsStore& store() { return store_; }
  stats::StatsPoller& poller() { return poller_; }
  api::AdminApi& admin() { return admin_; }
  api::UserStore& users() { return users_; }

  int control_port() const { return control_.port(); }
  int metrics_port() const { return metrics_.port(); }
  int admin_port() const { return admin_http_.port(); }

 private:
  void tick_loop();

  ServiceOptions options_;
  std::shared_ptr<Clock> clock_;
  int64_t started_ms_;
  controller::Controller ctl_;
  stats::StatsStore store_;
  stats::StatsPoller poller_;
  stats::ProcessSampler sampler_;
  api::UserStore users_;
  api::AdminApi admin_;
  net::TcpServer control_;
  api::HttpServer metrics_;
  api::HttpServer admin_http_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::atomic<bool> ticking_{false};
  std::thread ticker_;
};

}  // namespace sdx::service
