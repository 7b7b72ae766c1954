#pragma once

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sdx/cli/cli.h"
#include "sdx/config/model.h"

namespace sdx::cli::detail {

// Parses args into app. Returns an exit code when the run should stop here
// (help, version, or a usage error).
inline std::optional<int> parse_args(CLI::App& app, const std::vector<std::string>& args, std::ostream& out,
                                     std::ostream& err) {
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }
  return std::nullopt;
}

// Sends logs to stderr so stdout carries only command output.
inline void init_logging(const std::string& level) {
  if (!spdlog::get("sdx")) spdlog::set_default_logger(spdlog::stderr_color_mt("sdx"));
  spdlog::set_level(spdlog::level::from_str(level));
}

inline void print_config_error(std::ostream& err, const std::string& file, const config::ConfigError& e) {
  err << file;
  if (e.line() > 0) err << ":" << e.line() << ":" << e.column();
  err << ": " << config::error_code_name(e.code()) << ": " << e.detail() << "\n";
}

}  // namespace sdx::cli::detail
