#include "sdx/service/service.h"

#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <stdexcept>

#include "sdx/config/emit.h"
#include "sdx/stats/exposition.h"

namespace sdx::service {

namespace {

int env_port(const char* name, int fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  char* end = nullptr;
  const long port = std::strtol(v, &end, 10);
  if (*end != '\0' || port < 0 || port > 65535) {
    throw std::invalid_argument(std::string(name) + " is not a port number: " + v);
  }
  return static_cast<int>(port);
}

}  // namespace

ServiceOptions apply_env(ServiceOptions options) {
  options.control_port = env_port("SDX_CONTROL_PORT", options.control_port);
  options.metrics_port = env_port("SDX_METRICS_PORT", options.metrics_port);
  options.admin_port = env_port("SDX_ADMIN_PORT", options.admin_port);
  return options;
}

Service::Service(config::FabricConfig cfg, api::UserStore users, ServiceOptions options,
                 std::shared_ptr<Clock> clock)
    : options_(std::move(options)),
      clock_(std::move(clock)),
      started_ms_(clock_->now_ms()),
      ctl_(std::move(cfg), clock_, options_.controller),
      poller_(ctl_, store_, clock_, stats::PollerOptions{options_.stats_interval_ms}),
      users_(std::move(users)),
      admin_(api::AdminApiDeps{ctl_, store_, users_, [this] { return status(); }, options_.rate_window_s}) {
  metrics_.set_handler([this](const api::Request& req) {
    if (req.path != "/metrics") return api::Response::error(404, "not found");
    if (req.method != "GET") {
      auto r = api::Response::error(405, "method not allowed");
      r.headers["Allow"] = "GET";
      return r;
    }
    api::Response r;
    r.content_type = std::string(stats::kExpositionContentType);
    r.body = render_metrics();
    return r;
  });
  admin_http_.set_handler([this](const api::Request& req) { return admin_.handle(req); });
}

Service::~Service() { stop(); }

void Service::start() {
  const auto& host = options_.bind_address;
  try {
    control_.listen(host, options_.control_port, [this](std::shared_ptr<net::TcpConnection> conn) {
      ctl_.attach(conn, [&](std::shared_ptr<net::ByteSink> sink) { conn->start(std::move(sink)); });
    });
    metrics_.listen(host, options_.metrics_port);
    if (!options_.ui_dir.empty()) {
      if (std::filesystem::is_directory(options_.ui_dir)) {
        admin_http_.mount_static("/ui", options_.ui_dir);
      } else {
        spdlog::warn("ui directory {} not found; /ui disabled", options_.ui_dir);
      }
    }
    admin_http_.listen(host, options_.admin_port);
  } catch (...) {
    admin_http_.stop();
    metrics_.stop();
    control_.stop();
    throw;
  }
  spdlog::info("control on {}:{}, metrics on {}:{}, admin on {}:{}", host, control_.port(), host, metrics_.port(),
               host, admin_http_.port());
  ctl_.tick();
  ticking_ = true;
  ticker_ = std::thread([this] { tick_loop(); });
  poller_.start();
}

void Service::stop() {
  poller_.stop();
  {
    std::lock_guard lock(mu_);
    ticking_ = false;
  }
  cv_.notify_all();
  if (ticker_.joinable()) ticker_.join();
  admin_http_.stop();
  metrics_.stop();
  control_.stop();
}

void Service::tick_loop() {
  std::unique_lock lock(mu_);
  while (ticking_) {
    lock.unlock();
    ctl_.tick();
    lock.lock();
    cv_.wait_for(lock, std::chrono::milliseconds(options_.tick_ms), [this] { return !ticking_; });
  }
}

api::ControllerStatus Service::status() {
  api::ControllerStatus s;
  const auto& host = options_.bind_address;
  s.endpoints = {{"control", host, control_.port(), control_.listening()},
                 {"metrics", host, metrics_.port(), metrics_.listening()},
                 {"admin", host, admin_http_.port(), admin_http_.listening()}};
  const int64_t now = clock_->now_ms();
  s.controller_live = ticking_ && now - ctl_.last_heartbeat_ms() < kLivenessWindowMs;
  const int64_t beat = poller_.last_heartbeat_ms();
  s.stats_poller_live = poller_.running() && beat >= 0 && now - beat < kLivenessWindowMs;
  s.process = sampler_.sample();
  s.sessions = ctl_.sessions();
  s.active_fingerprint = config::config_fingerprint(*ctl_.active_config());
  s.uptime_ms = now - started_ms_;
  return s;
}

std::string Service::render_metrics() {
  return stats::render_exposition(store_, sampler_.sample(), stats::ExpositionOptions{options_.rate_window_s});
}

}  // namespace sdx::service
