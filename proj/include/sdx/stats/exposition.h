#pragma once

#include <string>
#include <string_view>

#include "sdx/stats/process.h"
#include "sdx/stats/store.h"

namespace sdx::stats {

inline constexpr std::string_view kExpositionContentType = "text/plain; version=0.0.4; charset=utf-8";

struct ExpositionOptions {
  double rate_window_s = kDefaultRateWindowS;
};

// Prometheus text format 0.0.4, sorted by metric name then labels. Rates
// are evaluated at the newest sample time, so the output only changes when
// the store does (or the process figures do).
std::string render_exposition(const StatsStore& store, const ProcessStats& process,
                              const ExpositionOptions& options = {});

std::string format_sample_value(double v);
std::string escape_label_value(std::string_view v);

}  // namespace sdx::stats
