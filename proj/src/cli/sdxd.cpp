#include <csignal>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "common.h"
#include "sdx/config/parse.h"
#include "sdx/config/validate.h"
#include "sdx/service/service.h"

namespace sdx::cli {

namespace {

int wait_for_signal() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  int sig = 0;
  sigwait(&set, &sig);
  return sig;
}

}  // namespace

int sdxd_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"SDX controller daemon", "sdxd"};
  std::string config_path = "configs/sdx.yaml";
  std::string users_path = "configs/users.json";
  std::string log_level = "info";
  std::optional<int> control_port;
  std::optional<int> metrics_port;
  std::optional<int> admin_port;
  service::ServiceOptions opt;
  double stats_interval_s = 15;
  app.add_option("--config", config_path, "Fabric configuration (YAML)")->capture_default_str();
  app.add_option("--users", users_path, "User store (JSON)")->capture_default_str();
  app.add_option("--bind", opt.bind_address, "Listen address")->capture_default_str();
  app.add_option("--control-port", control_port, "OpenFlow port (env SDX_CONTROL_PORT, default 6653)")
      ->check(CLI::Range(0, 65535));
  app.add_option("--metrics-port", metrics_port, "Metrics port (env SDX_METRICS_PORT, default 9302)")
      ->check(CLI::Range(0, 65535));
  app.add_option("--admin-port", admin_port, "Admin API port (env SDX_ADMIN_PORT, default 8080)")
      ->check(CLI::Range(0, 65535));
  app.add_option("--ui-dir", opt.ui_dir, "Static files served at /ui");
  app.add_option("--stats-interval", stats_interval_s, "Seconds between port stats polls")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--rate-window", opt.rate_window_s, "Default rate window in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--log-level", log_level, "trace, debug, info, warn or error")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error"}))
      ->capture_default_str();
  if (auto code = detail::parse_args(app, args, out, err)) return *code;

  detail::init_logging(log_level);

  try {
    opt = service::apply_env(opt);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  }
  if (control_port) opt.control_port = *control_port;
  if (metrics_port) opt.metrics_port = *metrics_port;
  if (admin_port) opt.admin_port = *admin_port;
  opt.stats_interval_ms = static_cast<int64_t>(stats_interval_s * 1000);

  std::ifstream in(config_path);
  if (!in) {
    err << "error: cannot open " << config_path << "\n";
    return kExitParse;
  }
  std::stringstream text;
  text << in.rdbuf();
  config::FabricConfig cfg;
  try {
    const auto doc = config::parse_document(text.str());
    for (const auto& w : doc.warnings) spdlog::warn("{}: {}", config_path, w);
    cfg = doc.config;
  } catch (const config::ConfigError& e) {
    detail::print_config_error(err, config_path, e);
    return kExitParse;
  }
  const auto report = config::validate(cfg);
  if (!report.ok()) {
    for (const auto& v : report.violations) err << config_path << ": " << v.path << ": " << v.message << "\n";
    return kExitValidation;
  }

  api::UserStore users;
  try {
    users = api::UserStore::load_file(users_path);
    users.set_persist_path(users_path);
  } catch (const std::exception& e) {
    err << "error: " << users_path << ": " << e.what() << "\n";
    return kExitParse;
  }

  // Block the signals before any thread starts so only sigwait sees them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  service::Service svc(std::move(cfg), std::move(users), opt);
  try {
    svc.start();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  const int sig = wait_for_signal();
  spdlog::info("signal {}, shutting down", sig);
  svc.stop();
  return kExitOk;
}

}  // namespace sdx::cli
