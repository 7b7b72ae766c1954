#include <fmt/format.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "common.h"
#include "json.hpp"
#include "sdx/config/parse.h"
#include "sdx/config/validate.h"
#include "sdx/controller/controller.h"
#include "sdx/sim/fabric.h"
#include "sdx/stats/poller.h"
#include "sdx/stats/store.h"

namespace sdx::cli {

using nlohmann::json;

namespace {

struct RunOptions {
  std::string topology;
  std::string config;
  std::string controller;
  double duration_s = 60;
  int64_t tick_ms = 100;
  double stats_interval_s = 15;
  double window_s = stats::kDefaultRateWindowS;
  bool realtime = false;
  bool as_json = false;
  std::string log_level = "error";
};

std::optional<std::pair<std::string, int>> split_host_port(const std::string& s) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos || colon == 0) return std::nullopt;
  const auto port = config::parse_unsigned(s.substr(colon + 1));
  if (!port || *port == 0 || *port > 65535) return std::nullopt;
  return std::make_pair(s.substr(0, colon), static_cast<int>(*port));
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string class_name(const sim::TrafficClass& c) {
  std::string s = fmt::format("0x{:04x}", c.eth_type);
  if (c.ip_proto) s += fmt::format("/{}", *c.ip_proto);
  return s;
}

// Waits (in real time) until every switch holds a non-empty table pushed by
// a remote controller.
bool wait_for_tables(const sim::SimFabric& fabric, std::chrono::milliseconds limit) {
  const auto deadline = std::chrono::steady_clock::now() + limit;
  while (std::chrono::steady_clock::now() < deadline) {
    bool all = true;
    for (const auto& s : fabric.spec().switches) {
      if (fabric.read_flow_table(s.dp_id, true).entries.empty()) all = false;
    }
    if (all) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  return false;
}

void advance(sim::SimFabric& fabric, const RunOptions& o) {
  const int64_t total = static_cast<int64_t>(o.duration_s * 1000);
  if (!o.realtime) {
    fabric.advance_ms(total);
    return;
  }
  const auto t0 = std::chrono::steady_clock::now();
  for (int64_t done = 0; done < total;) {
    const int64_t step = std::min(o.tick_ms, total - done);
    fabric.advance_ms(step);
    done += step;
    std::this_thread::sleep_until(t0 + std::chrono::milliseconds(done));
  }
}

int run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  sim::TopologySpec topo;
  try {
    topo = sim::load_topology_file(o.topology);
  } catch (const std::exception& e) {
    err << "error: " << o.topology << ": " << e.what() << "\n";
    return kExitParse;
  }

  std::optional<config::FabricConfig> cfg;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) {
      err << "error: cannot open " << o.config << "\n";
      return kExitParse;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      cfg = config::parse_config(ss.str());
    } catch (const config::ConfigError& e) {
      detail::print_config_error(err, o.config, e);
      return kExitParse;
    }
    const auto report = config::validate(*cfg);
    if (!report.ok()) {
      for (const auto& v : report.violations) err << o.config << ": " << v.path << ": " << v.message << "\n";
      return kExitValidation;
    }
  }

  auto clock = std::make_shared<ManualClock>();
  sim::SimOptions sim_opt;
  sim_opt.tick_ms = o.tick_ms;
  std::unique_ptr<controller::Controller> ctl;
  std::unique_ptr<stats::StatsStore> store;
  std::unique_ptr<stats::StatsPoller> poller;
  std::unique_ptr<sim::SimFabric> fabric;
  try {
    fabric = std::make_unique<sim::SimFabric>(topo, clock, sim_opt);
    if (cfg) {
      ctl = std::make_unique<controller::Controller>(*cfg, clock);
      store = std::make_unique<stats::StatsStore>();
      stats::PollerOptions popt;
      popt.interval_ms = static_cast<int64_t>(o.stats_interval_s * 1000);
      poller = std::make_unique<stats::StatsPoller>(*ctl, *store, clock, popt);
      fabric->on_tick([&](int64_t) {
        ctl->tick();
        poller->poll_if_due();
      });
      fabric->connect(*ctl);
    } else {
      const auto hp = split_host_port(o.controller);
      if (!hp) {
        err << "error: --controller wants host:port\n";
        return kExitParse;
      }
      fabric->connect_tcp(hp->first, hp->second);
      if (!wait_for_tables(*fabric, std::chrono::seconds(10))) {
        err << "error: controller at " << o.controller << " did not program every switch\n";
        return kExitRemote;
      }
    }
    fabric->announce_hosts();
    advance(*fabric, o);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }

  bool conserved = true;
  json flows = json::array();
  for (const auto& f : fabric->flow_ledgers()) {
    conserved = conserved && f.conserved();
    flows.push_back({{"name", f.name},
                     {"sent", f.sent},
                     {"bytes_sent", f.bytes_sent},
                     {"delivered", f.delivered},
                     {"dropped", f.dropped},
                     {"redirected", f.redirected},
                     {"in_flight", f.in_flight},
                     {"mirrored", f.mirrored},
                     {"flooded", f.flooded},
                     {"conserved", f.conserved()}});
  }
  json hosts = json::array();
  for (const auto& h : fabric->host_ledgers()) {
    json by_class = json::object();
    for (const auto& [c, n] : h.received_by_class) by_class[class_name(c)] = n;
    hosts.push_back({{"name", h.name}, {"sent", h.sent}, {"received", h.received}, {"received_by_class", by_class}});
  }
  json switches = json::array();
  for (const auto& s : topo.switches) {
    const auto c = fabric->switch_counters(s.name);
    json ports = json::array();
    for (const auto& p : fabric->port_counters(s.dp_id)) {
      json pj = {{"port", p.port_no},
                 {"rx_packets", p.rx_packets},
                 {"tx_packets", p.tx_packets},
                 {"rx_bytes", p.rx_bytes},
                 {"tx_bytes", p.tx_bytes},
                 {"rx_dropped", p.rx_dropped},
                 {"tx_dropped", p.tx_dropped}};
      if (store) {
        const auto r = stats::compute_rates(*store, {s.name, p.port_no}, o.window_s, clock->now_ms());
        pj["rates"] = {{"bits_in_per_sec", opt_json(r.bits_in_per_sec)},
                       {"bits_out_per_sec", opt_json(r.bits_out_per_sec)},
                       {"pkts_in_per_sec", opt_json(r.pkts_in_per_sec)},
                       {"pkts_out_per_sec", opt_json(r.pkts_out_per_sec)}};
      }
      ports.push_back(pj);
    }
    switches.push_back({{"name", s.name},
                        {"flow_mods", c.flow_mods},
                        {"flow_mod_errors", c.flow_mod_errors},
                        {"barriers", c.barriers},
                        {"packet_ins", c.packet_ins},
                        {"packet_outs", c.packet_outs},
                        {"stats_requests", c.stats_requests},
                        {"ports", ports}});
  }

  for (const auto& s : topo.switches) {
    if (fabric->connected(s.name)) fabric->disconnect(s.name);
  }

  if (o.as_json) {
    out << json{{"duration_s", o.duration_s},
                {"conserved", conserved},
                {"flows", flows},
                {"hosts", hosts},
                {"switches", switches}}
               .dump(2)
        << "\n";
    return conserved ? kExitOk : kExitFailure;
  }

  out << fmt::format("simulated {} s\n\n", o.duration_s);
  out << fmt::format("{:<14} {:>10} {:>10} {:>9} {:>10} {:>9} {:>9} {:>9}\n", "flow", "sent", "delivered",
                     "dropped", "redirected", "in_flight", "mirrored", "flooded");
  for (const auto& f : flows) {
    out << fmt::format("{:<14} {:>10} {:>10} {:>9} {:>10} {:>9} {:>9} {:>9}\n", f["name"].get<std::string>(),
                       f["sent"].get<uint64_t>(), f["delivered"].get<uint64_t>(), f["dropped"].get<uint64_t>(),
                       f["redirected"].get<uint64_t>(), f["in_flight"].get<uint64_t>(),
                       f["mirrored"].get<uint64_t>(), f["flooded"].get<uint64_t>());
  }
  out << "conservation " << (conserved ? "holds" : "VIOLATED") << "\n\n";
  for (const auto& h : hosts) {
    out << fmt::format("{:<8} sent {:>10} received {:>10}", h["name"].get<std::string>(), h["sent"].get<uint64_t>(),
                       h["received"].get<uint64_t>());
    for (const auto& [k, v] : h["received_by_class"].items()) out << fmt::format("  {}={}", k, v.get<uint64_t>());
    out << "\n";
  }
  for (const auto& s : switches) {
    out << fmt::format("\n{}: flow_mods {} errors {} barriers {} packet_ins {} packet_outs {} stats_requests {}\n",
                       s["name"].get<std::string>(), s["flow_mods"].get<uint64_t>(),
                       s["flow_mod_errors"].get<uint64_t>(), s["barriers"].get<uint64_t>(),
                       s["packet_ins"].get<uint64_t>(), s["packet_outs"].get<uint64_t>(),
                       s["stats_requests"].get<uint64_t>());
    out << fmt::format("  {:>4} {:>12} {:>12} {:>14} {:>14} {:>12} {:>12}\n", "port", "rx_pkts", "tx_pkts",
                       "rx_bytes", "tx_bytes", "bits_in/s", "bits_out/s");
    for (const auto& p : s["ports"]) {
      auto rate = [&](const char* k) {
        if (!p.contains("rates") || p["rates"][k].is_null()) return std::string("-");
        return fmt::format("{:.4g}", p["rates"][k].get<double>());
      };
      out << fmt::format("  {:>4} {:>12} {:>12} {:>14} {:>14} {:>12} {:>12}\n", p["port"].get<uint32_t>(),
                         p["rx_packets"].get<uint64_t>(), p["tx_packets"].get<uint64_t>(),
                         p["rx_bytes"].get<uint64_t>(), p["tx_bytes"].get<uint64_t>(), rate("bits_in_per_sec"),
                         rate("bits_out_per_sec"));
    }
  }
  return conserved ? kExitOk : kExitFailure;
}

}  // namespace

int sdxsim_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulated SDX fabric", "sdxsim"};
  app.require_subcommand(1);
  RunOptions o;
  auto* run_cmd = app.add_subcommand("run", "Run a topology against a config or a live controller");
  run_cmd->add_option("--topology", o.topology, "Topology file (YAML)")->required();
  auto* cfg_opt = run_cmd->add_option("--config", o.config, "Fabric config; runs an in-process controller");
  auto* ctl_opt = run_cmd->add_option("--controller", o.controller, "host:port of a running sdxd");
  cfg_opt->excludes(ctl_opt);
  run_cmd->add_option("--duration", o.duration_s, "Simulated seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run_cmd->add_option("--tick-ms", o.tick_ms, "Simulation tick")->check(CLI::Range(1, 60000))->capture_default_str();
  run_cmd->add_option("--stats-interval", o.stats_interval_s, "Seconds between stats polls (with --config)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run_cmd->add_option("--window", o.window_s, "Rate window in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run_cmd->add_flag("--realtime", o.realtime, "Pace the simulated clock to wall time");
  run_cmd->add_flag("--json", o.as_json, "Machine-readable output");
  run_cmd->add_option("--log-level", o.log_level, "trace, debug, info, warn or error")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error"}))
      ->capture_default_str();
  if (auto code = detail::parse_args(app, args, out, err)) return *code;
  if (o.config.empty() == o.controller.empty()) {
    err << "error: give exactly one of --config and --controller\n";
    return kExitParse;
  }
  detail::init_logging(o.log_level);
  return run(o, out, err);
}

}  // namespace sdx::cli
