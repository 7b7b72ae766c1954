#include "sdx/stats/exposition.h"

#include <fmt/format.h>

#include <cmath>
#include <map>
#include <vector>

namespace sdx::stats {

std::string format_sample_value(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "+Inf" : "-Inf";
  if (v == std::floor(v) && std::fabs(v) < 9007199254740992.0) {
    return fmt::format("{}", static_cast<int64_t>(v));
  }
  return fmt::format("{}", v);
}

std::string escape_label_value(std::string_view v) {
  std::string out;
  for (char c : v) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

struct Family {
  std::string type;
  std::string help;
  std::vector<std::pair<std::string, double>> rows;
};

std::string port_labels(const PortKey& k) {
  return fmt::format("{{dp=\"{}\",port=\"{}\"}}", escape_label_value(k.dp), k.port);
}

}  // namespace

std::string render_exposition(const StatsStore& store, const ProcessStats& process,
                              const ExpositionOptions& options) {
  std::map<std::string, Family> families;
  auto add = [&](const std::string& name, const char* type, const char* help, std::string labels, double v) {
    auto& f = families[name];
    f.type = type;
    f.help = help;
    f.rows.emplace_back(std::move(labels), v);
  };

  add("process_cpu_percent", "gauge", "CPU time of this process as a percentage of one core.", "",
      process.cpu_percent);
  add("process_resident_memory_bytes", "gauge", "Resident memory size in bytes.", "",
      static_cast<double>(process.resident_bytes));
  add("process_virtual_memory_bytes", "gauge", "Virtual memory size in bytes.", "",
      static_cast<double>(process.virtual_bytes));
  add("sdx_samples_appended_total", "counter", "Counter samples appended to the store.", "",
      static_cast<double>(store.samples_appended()));

  const auto now = store.latest_sample_ms();
  for (const auto& key : store.ports()) {
    const auto labels = port_labels(key);
    for (Counter c : kAllCounters) {
      const auto s = store.series(key, c);
      if (s.empty()) continue;
      add(fmt::format("sdx_port_{}_total", counter_name(c)), "counter", "Port counter as reported by the switch.",
          labels, s.back().value);
    }
    if (!now) continue;
    const auto r = compute_rates(store, key, options.rate_window_s, *now);
    auto rate = [&](const char* name, const std::optional<double>& v) {
      if (v) add(name, "gauge", "Per-second rate over the rate window.", labels, *v);
    };
    rate("sdx_port_bits_in_per_second", r.bits_in_per_sec);
    rate("sdx_port_bits_out_per_second", r.bits_out_per_sec);
    rate("sdx_port_packets_in_per_second", r.pkts_in_per_sec);
    rate("sdx_port_packets_out_per_second", r.pkts_out_per_sec);
    rate("sdx_port_drops_in_per_second", r.drops_in_per_sec);
    rate("sdx_port_drops_out_per_second", r.drops_out_per_sec);
    rate("sdx_port_errors_in_per_second", r.errors_in_per_sec);
    rate("sdx_port_errors_out_per_second", r.errors_out_per_sec);
  }
  for (const auto& [dp, meta] : store.scrape_meta()) {
    const auto labels = fmt::format("{{dp=\"{}\"}}", escape_label_value(dp));
    add("sdx_scrape_duration_seconds", "gauge", "Duration of the last port-stats scrape.", labels, meta.duration_s);
    add("sdx_scrape_last_success", "gauge", "1 if the last scrape of the target succeeded.", labels,
        meta.last_success ? 1 : 0);
  }

  std::string out;
  for (const auto& [name, f] : families) {
    out += fmt::format("# HELP {} {}\n# TYPE {} {}\n", name, f.help, name, f.type);
    for (const auto& [labels, v] : f.rows) out += fmt::format("{}{} {}\n", name, labels, format_sample_value(v));
  }
  return out;
}

}  // namespace sdx::stats
