#include <fmt/format.h>
#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "common.h"
#include "json.hpp"
#include "sdx/config/emit.h"
#include "sdx/config/parse.h"
#include "sdx/config/validate.h"
#include "sdx/rules/compiler.h"

namespace sdx::cli {

using nlohmann::json;

namespace {

constexpr const char* kDefaultApi = "http://127.0.0.1:8080";

struct Remote {
  std::string api;
  std::string token;
};

struct Reply {
  int status = 0;
  std::string body;
  std::string error;
};

Reply call(const Remote& remote, const std::string& method, const std::string& path, const std::string& body = "",
           const std::string& content_type = "application/json") {
  Reply reply;
  httplib::Client client(remote.api);
  if (!client.is_valid()) {
    reply.error = "invalid API address '" + remote.api + "'";
    return reply;
  }
  client.set_connection_timeout(std::chrono::seconds(5));
  client.set_read_timeout(std::chrono::seconds(60));
  httplib::Headers headers;
  if (!remote.token.empty()) headers.emplace("Authorization", "Bearer " + remote.token);
  httplib::Result r;
  if (method == "GET") r = client.Get(path, headers);
  else if (method == "POST") r = client.Post(path, headers, body, content_type);
  else if (method == "PUT") r = client.Put(path, headers, body, content_type);
  if (!r) {
    reply.error = "cannot reach " + remote.api + ": " + httplib::to_string(r.error());
    return reply;
  }
  reply.status = r->status;
  reply.body = r->body;
  return reply;
}

// Reports a non-2xx reply and returns its exit code.
int report_failure(const Reply& r, std::ostream& err) {
  if (!r.error.empty()) {
    err << "error: " << r.error << "\n";
    return kExitRemote;
  }
  std::string message = r.body;
  try {
    auto j = json::parse(r.body);
    if (j.contains("error")) message = j["error"].get<std::string>();
    if (j.contains("violations")) {
      for (const auto& v : j["violations"]) {
        message += fmt::format("\n  {}: {}", v["path"].get<std::string>(), v["message"].get<std::string>());
      }
    }
  } catch (const json::exception&) {
  }
  err << "error: HTTP " << r.status << ": " << message << "\n";
  return exit_code_for_status(r.status);
}

std::optional<std::string> read_file(const std::string& path, std::ostream& err) {
  std::ifstream in(path);
  if (!in) {
    err << "error: cannot open " << path << "\n";
    return std::nullopt;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string human_bytes(double b) {
  const char* units[] = {"B", "KiB", "MiB", "GiB"};
  int u = 0;
  while (b >= 1024 && u < 3) {
    b /= 1024;
    ++u;
  }
  return fmt::format("{:.1f} {}", b, units[u]);
}

std::string rate_cell(const json& v) { return v.is_null() ? "-" : fmt::format("{:.4g}", v.get<double>()); }

void print_apply_report(const json& j, std::ostream& out) {
  for (const auto& d : j["dps"]) {
    out << fmt::format("{:<12} {:<9} +{:<5} -{:<5} {:.1f} ms", d["dp"].get<std::string>(),
                       d["outcome"].get<std::string>(), d["added"].get<size_t>(), d["removed"].get<size_t>(),
                       d["duration_ms"].get<double>());
    if (!d["error"].get<std::string>().empty()) out << "  " << d["error"].get<std::string>();
    out << "\n";
  }
  out << (j["ok"].get<bool>() ? "applied" : "failed") << ", fingerprint " << j["fingerprint"].get<std::string>()
      << "\n";
}

int cmd_validate(const std::string& file, bool as_json, std::ostream& out, std::ostream& err) {
  auto text = read_file(file, err);
  if (!text) return kExitParse;
  config::ParsedDocument doc;
  try {
    doc = config::parse_document(*text);
  } catch (const config::ConfigError& e) {
    if (as_json) {
      out << json{{"ok", false}, {"code", config::error_code_name(e.code())}, {"message", e.detail()},
                  {"line", e.line()}, {"column", e.column()}}
                 .dump(2)
          << "\n";
    } else {
      detail::print_config_error(err, file, e);
    }
    return kExitParse;
  }
  const auto report = config::validate(doc.config);
  if (as_json) {
    json violations = json::array();
    for (const auto& v : report.violations) {
      violations.push_back({{"code", v.code}, {"path", v.path}, {"message", v.message}});
    }
    json j = {{"ok", report.ok()}, {"violations", violations}, {"warnings", doc.warnings}};
    if (report.ok()) j["fingerprint"] = config::format_hex(config::config_fingerprint(doc.config));
    out << j.dump(2) << "\n";
  } else {
    for (const auto& w : doc.warnings) err << file << ": warning: " << w << "\n";
    for (const auto& v : report.violations) err << file << ": " << v.path << ": " << v.message << "\n";
    if (report.ok()) {
      out << fmt::format("{}: ok ({} vlans, {} dps, {} acls, fingerprint {})\n", file, doc.config.vlans.size(),
                         doc.config.dps.size(), doc.config.acls.size(),
                         config::format_hex(config::config_fingerprint(doc.config)));
    }
  }
  return report.ok() ? kExitOk : kExitValidation;
}

int cmd_compile(const std::string& file, const std::string& dp, bool as_json, std::ostream& out,
                std::ostream& err) {
  auto text = read_file(file, err);
  if (!text) return kExitParse;
  config::FabricConfig cfg;
  try {
    cfg = config::parse_config(*text);
  } catch (const config::ConfigError& e) {
    detail::print_config_error(err, file, e);
    return config::is_validation_error(e.code()) ? kExitValidation : kExitParse;
  }
  const auto report = config::validate(cfg);
  if (!report.ok()) {
    for (const auto& v : report.violations) err << file << ": " << v.path << ": " << v.message << "\n";
    return kExitValidation;
  }
  std::vector<std::string> names;
  if (dp.empty()) {
    for (const auto& [n, d] : cfg.dps) names.push_back(n);
  } else if (!cfg.dps.count(dp)) {
    err << "error: no datapath '" << dp << "' in " << file << "\n";
    return kExitValidation;
  } else {
    names.push_back(dp);
  }
  json all = json::array();
  for (const auto& name : names) {
    rules::FlowTable table;
    try {
      table = rules::compile_datapath(cfg, name);
    } catch (const rules::CompileError& e) {
      err << "error: " << name << ": " << e.what() << "\n";
      return kExitValidation;
    }
    if (as_json) {
      json entries = json::array();
      for (const auto& e : table.entries) {
        entries.push_back({{"table", e.table_id},
                           {"priority", e.priority},
                           {"cookie", config::format_hex(e.cookie)},
                           {"flow", e.to_string()}});
      }
      all.push_back({{"dp", name},
                     {"dp_id", config::format_hex(table.dp_id)},
                     {"fingerprint", config::format_hex(table.fingerprint)},
                     {"entries", entries}});
    } else {
      out << "# " << name << " dp_id=" << config::format_hex(table.dp_id) << " entries=" << table.entries.size()
          << "\n"
          << table.dump();
    }
  }
  if (as_json) out << all.dump(2) << "\n";
  return kExitOk;
}

int cmd_apply(const Remote& remote, const std::string& file, bool as_json, std::ostream& out, std::ostream& err) {
  if (!file.empty()) {
    auto text = read_file(file, err);
    if (!text) return kExitParse;
    auto put = call(remote, "PUT", "/config/yaml", *text, "application/yaml");
    if (put.status != 200) return report_failure(put, err);
  }
  auto r = call(remote, "POST", "/config/apply");
  if (r.status != 200 && r.status != 502) return report_failure(r, err);
  const auto j = json::parse(r.body);
  if (as_json) {
    out << j.dump(2) << "\n";
  } else {
    print_apply_report(j, out);
  }
  return r.status == 200 ? kExitOk : kExitRemote;
}

int cmd_status(const Remote& remote, bool as_json, std::ostream& out, std::ostream& err) {
  auto r = call(remote, "GET", "/status");
  if (r.status != 200) return report_failure(r, err);
  const auto j = json::parse(r.body);
  if (as_json) {
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  for (const auto& e : j["endpoints"]) {
    out << fmt::format("{:<8} {}:{:<6} {}\n", e["name"].get<std::string>(), e["address"].get<std::string>(),
                       e["port"].get<int>(), e["listening"].get<bool>() ? "listening" : "down");
  }
  for (const auto& [role, live] : j["roles"].items()) {
    out << fmt::format("{:<13} {}\n", role, live.get<bool>() ? "live" : "stalled");
  }
  out << fmt::format("cpu {:.3f}%  resident {}  virtual {}\n", j["cpu_percent"].get<double>(),
                     human_bytes(j["resident_memory_bytes"].get<double>()),
                     human_bytes(j["virtual_memory_bytes"].get<double>()));
  out << "active config " << j["active_fingerprint"].get<std::string>() << "\n";
  for (const auto& s : j["sessions"]) {
    out << fmt::format("  {:<10} {:<8} {:<9} {}\n", s["dp"].get<std::string>(),
                       s["dp_id"].is_null() ? std::string("-") : config::format_hex(s["dp_id"].get<uint64_t>()),
                       s["state"].get<std::string>(), s["peer"].get<std::string>());
  }
  return kExitOk;
}

int cmd_stats(const Remote& remote, const std::string& dp, std::optional<uint32_t> port,
              std::optional<double> window, bool as_json, std::ostream& out, std::ostream& err) {
  std::string path = "/stats/ports";
  httplib::Params params;
  if (!dp.empty()) params.emplace("dp", dp);
  if (port) params.emplace("port", std::to_string(*port));
  if (window) params.emplace("window", fmt::format("{}", *window));
  if (!params.empty()) path = httplib::append_query_params(path, params);
  auto r = call(remote, "GET", path);
  if (r.status == 204) {
    if (as_json) {
      out << "null\n";
    } else {
      out << "no data yet for " << dp << " port " << *port << "\n";
    }
    return kExitOk;
  }
  if (r.status != 200) return report_failure(r, err);
  const auto j = json::parse(r.body);
  if (as_json) {
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  if (j.contains("ports")) {
    out << fmt::format("{:<10} {:>5} {:>12} {:>12} {:>12} {:>12}\n", "dp", "port", "bits_in/s", "bits_out/s",
                       "pkts_in/s", "pkts_out/s");
    for (const auto& p : j["ports"]) {
      const auto& rt = p["rates"];
      auto cell = [&](const char* k) { return rt.is_null() ? std::string("-") : rate_cell(rt[k]); };
      out << fmt::format("{:<10} {:>5} {:>12} {:>12} {:>12} {:>12}\n", p["dp"].get<std::string>(),
                         p["port"].get<uint32_t>(), cell("bits_in_per_sec"), cell("bits_out_per_sec"),
                         cell("pkts_in_per_sec"), cell("pkts_out_per_sec"));
    }
    return kExitOk;
  }
  const auto& rt = j["rates"];
  out << fmt::format("{} port {} (window {} s)\n", j["dp"].get<std::string>(), j["port"].get<uint32_t>(),
                     j["window_s"].get<double>());
  out << fmt::format("{:<10} {:>12} {:>12}\n", "", "in", "out");
  out << fmt::format("{:<10} {:>12} {:>12}\n", "bits/s", rate_cell(rt["bits_in_per_sec"]),
                     rate_cell(rt["bits_out_per_sec"]));
  out << fmt::format("{:<10} {:>12} {:>12}\n", "packets/s", rate_cell(rt["pkts_in_per_sec"]),
                     rate_cell(rt["pkts_out_per_sec"]));
  out << fmt::format("{:<10} {:>12} {:>12}\n", "drops/s", rate_cell(rt["drops_in_per_sec"]),
                     rate_cell(rt["drops_out_per_sec"]));
  out << fmt::format("{:<10} {:>12} {:>12}\n", "errors/s", rate_cell(rt["errors_in_per_sec"]),
                     rate_cell(rt["errors_out_per_sec"]));
  return kExitOk;
}

}  // namespace

int sdxctl_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"SDX fabric operator tool", "sdxctl"};
  app.require_subcommand(1);
  Remote remote;
  if (const char* v = std::getenv("SDX_API")) remote.api = v;
  if (const char* v = std::getenv("SDX_TOKEN")) remote.token = v;
  if (remote.api.empty()) remote.api = kDefaultApi;
  bool as_json = false;
  app.add_option("--api", remote.api, "Admin API base URL (env SDX_API)");
  app.add_option("--token", remote.token, "Bearer token (env SDX_TOKEN)");
  app.add_flag("--json", as_json, "Machine-readable output");

  std::string file;
  auto* validate = app.add_subcommand("validate", "Check a configuration file");
  validate->add_option("file", file, "YAML configuration")->required();

  std::string dp;
  auto* compile = app.add_subcommand("compile", "Print the flow tables compiled from a file");
  compile->add_option("file", file, "YAML configuration")->required();
  compile->add_option("--dp", dp, "Datapath name (default: all)");

  auto* apply = app.add_subcommand("apply", "Stage a file (optional) and apply the staged config");
  apply->add_option("file", file, "YAML configuration to stage first");

  app.add_subcommand("status", "Controller status");

  std::optional<uint32_t> port;
  std::optional<double> window;
  auto* stats = app.add_subcommand("stats", "Port rates");
  stats->add_option("--dp", dp, "Datapath name");
  stats->add_option("--port", port, "Port number");
  stats->add_option("--window", window, "Rate window in seconds");

  GenAclOptions gen;
  std::optional<unsigned> dl_type_opt;
  std::optional<unsigned> ip_proto_opt;
  std::string dl_type_text;
  auto* gen_acl = app.add_subcommand("gen-acl", "Print an ACL snippet");
  gen_acl->add_option("kind", gen.kind, "mirror, block, redirect or allow")
      ->required()
      ->check(CLI::IsMember({"mirror", "block", "redirect", "allow"}));
  gen_acl->add_option("--name", gen.name, "ACL name (default: the kind)");
  gen_acl->add_option("--to", gen.to, "Mirror or redirect port");
  gen_acl->add_flag("--ipv4-icmp", gen.ipv4_icmp, "Match ICMP over IPv4");
  gen_acl->add_flag("--ipv6-icmp", gen.ipv6_icmp, "Match ICMPv6");
  gen_acl->add_option("--dl-type", dl_type_text, "Match an EtherType (decimal or 0x hex)");
  gen_acl->add_option("--ip-proto", ip_proto_opt, "Match an IP protocol (with --dl-type)");
  gen_acl->add_flag("--allow", gen.allow, "Mirror only: let the original through");
  gen_acl->add_flag("--allow-all", gen.allow_all, "Append the allow-all ACL");

  if (auto code = detail::parse_args(app, args, out, err)) return *code;

  try {
    if (validate->parsed()) return cmd_validate(file, as_json, out, err);
    if (compile->parsed()) return cmd_compile(file, dp, as_json, out, err);
    if (apply->parsed()) return cmd_apply(remote, file, as_json, out, err);
    if (app.got_subcommand("status")) return cmd_status(remote, as_json, out, err);
    if (stats->parsed()) {
      if (dp.empty() != !port) {
        err << "error: --dp and --port go together\n";
        return kExitParse;
      }
      return cmd_stats(remote, dp, port, window, as_json, out, err);
    }
    if (gen_acl->parsed()) {
      if (!dl_type_text.empty()) {
        const auto v = config::parse_unsigned(dl_type_text);
        if (!v || *v > 0xffff) {
          err << "error: bad --dl-type '" << dl_type_text << "'\n";
          return kExitParse;
        }
        gen.dl_type = static_cast<uint16_t>(*v);
      }
      if (ip_proto_opt) {
        if (*ip_proto_opt > 255) {
          err << "error: bad --ip-proto\n";
          return kExitParse;
        }
        gen.ip_proto = static_cast<uint8_t>(*ip_proto_opt);
      }
      std::map<std::string, config::AclRules> acls;
      try {
        acls = generate_acls(gen);
      } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitParse;
      }
      out << config::emit_acls(acls);
      return kExitOk;
    }
  } catch (const json::exception& e) {
    err << "error: unexpected response: " << e.what() << "\n";
    return kExitRemote;
  }
  return kExitParse;
}

}  // namespace sdx::cli
