#include <doctest.h>

#include <random>
#include <thread>

#include "sdx/config/parse.h"
#include "sdx/stats/exposition.h"
#include "sdx/stats/poller.h"
#include "sdx/stats/process.h"
#include "sdx/stats/store.h"
#include "support/exposition_check.h"
#include "support/fixtures.h"
#include "support/harness.h"

using namespace sdx;
using stats::Counter;
using stats::PortKey;
using stats::Sample;
using stats::StatsStore;

namespace {

config::FabricConfig stock() { return config::parse_config(testing::stock_text()); }

config::FabricConfig two_dp_config() {
  auto cfg = stock();
  config::DatapathConfig sw2;
  sw2.name = "sw2";
  sw2.dp_id = 0x2;
  for (uint32_t p = 1; p <= 4; ++p) {
    config::InterfaceConfig i;
    i.name = "P" + std::to_string(p);
    i.native_vlan = "office";
    sw2.interfaces[p] = i;
  }
  cfg.dps["sw2"] = sw2;
  return cfg;
}

sim::TopologySpec two_switches() {
  return sim::parse_topology(R"(
switches:
  - {name: sw1, dp_id: 0x1, ports: 4}
  - {name: sw2, dp_id: 0x2, ports: 4}
)");
}

of::PortStatsEntry entry(uint32_t port, uint64_t rx_bytes, uint64_t rx_packets = 0) {
  of::PortStatsEntry e;
  e.port_no = port;
  e.rx_bytes = rx_bytes;
  e.rx_packets = rx_packets;
  return e;
}

std::vector<Sample> series_of(std::initializer_list<std::pair<int64_t, double>> points) {
  stats::Series s;
  for (const auto& [t, v] : points) s.append(t, v);
  return s.samples();
}

// Every usable pair ends at the newest sample in the window and has no reset
// after its start; the widest such pair wins.
std::optional<double> brute_force_rate(const std::vector<Sample>& s, double window_s, int64_t now_ms) {
  std::vector<size_t> in;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i].t_ms <= now_ms && static_cast<double>(s[i].t_ms) >= static_cast<double>(now_ms) - window_s * 1000) {
      in.push_back(i);
    }
  }
  std::optional<double> best;
  int64_t best_span = -1;
  for (size_t a = 0; a < in.size(); ++a) {
    for (size_t b = a + 1; b < in.size(); ++b) {
      bool clean = true;
      for (size_t k = in[a] + 1; k <= in[b]; ++k) {
        if (s[k].reset) clean = false;
      }
      if (!clean || b != in.size() - 1) continue;
      const int64_t span = s[in[b]].t_ms - s[in[a]].t_ms;
      if (span > best_span) {
        best_span = span;
        best = (s[in[b]].value - s[in[a]].value) / (static_cast<double>(span) / 1000.0);
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("series keeps increasing timestamps in a bounded ring") {
  stats::Series s(3);
  CHECK(s.append(10, 1));
  CHECK_FALSE(s.append(10, 2));
  CHECK_FALSE(s.append(5, 2));
  CHECK(s.append(20, 5));
  CHECK(s.append(30, 3));
  CHECK(s.append(40, 4));
  const auto v = s.samples();
  REQUIRE(v.size() == 3);
  CHECK(v[0] == Sample{20, 5, false});
  CHECK(v[1] == Sample{30, 3, true});
  CHECK(v[2] == Sample{40, 4, false});
}

TEST_CASE("rates from two samples one second apart") {
  CHECK(stats::compute_rate(series_of({{0, 0}, {1000, 125000000}}), 60, 1000).value() * 8 == 1.0e9);
  CHECK(stats::compute_rate(series_of({{0, 0}, {1000, 75000}}), 60, 1000).value() == 75000);
}

TEST_CASE("a reset re-anchors the window") {
  const auto s = series_of({{0, 100}, {15000, 40}, {30000, 90}});
  CHECK(s[1].reset);
  CHECK(stats::compute_rate(s, 60, 30000).value() == doctest::Approx(50.0 / 15.0));
  CHECK_FALSE(stats::compute_rate(series_of({{0, 100}, {15000, 40}}), 60, 15000));
}

TEST_CASE("too few samples is no data, not zero") {
  CHECK_FALSE(stats::compute_rate({}, 60, 0));
  CHECK_FALSE(stats::compute_rate(series_of({{0, 5}}), 60, 0));
  const auto s = series_of({{0, 0}, {15000, 10}, {90000, 40}});
  CHECK_FALSE(stats::compute_rate(s, 60, 90000));
  CHECK(stats::compute_rate(s, 90, 90000).value() == doctest::Approx(40.0 / 90.0));
  CHECK(stats::compute_rate(s, 60, 15000).value() == doctest::Approx(10.0 / 15.0));
}

TEST_CASE("rates agree with the brute-force pair oracle") {
  std::mt19937 rng(7);
  int with_data = 0;
  for (int round = 0; round < 2000; ++round) {
    stats::Series s;
    int64_t t = std::uniform_int_distribution<int64_t>(0, 5000)(rng);
    double v = std::uniform_int_distribution<int>(0, 1000)(rng);
    const int n = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int i = 0; i < n; ++i) {
      s.append(t, v);
      t += std::uniform_int_distribution<int64_t>(1, 20000)(rng);
      if (std::uniform_int_distribution<int>(0, 5)(rng) == 0) {
        v = std::uniform_int_distribution<int>(0, static_cast<int>(v))(rng);
      } else {
        v += std::uniform_int_distribution<int>(0, 100000)(rng);
      }
    }
    const double window = std::uniform_int_distribution<int>(1, 120)(rng);
    const int64_t now = t - std::uniform_int_distribution<int64_t>(0, 30000)(rng);
    const auto got = stats::compute_rate(s.samples(), window, now);
    const auto want = brute_force_rate(s.samples(), window, now);
    REQUIRE(got.has_value() == want.has_value());
    if (got) {
      ++with_data;
      CHECK(*got == doctest::Approx(*want));
      CHECK(*got >= 0);
    }
  }
  CHECK(with_data > 300);
}

TEST_CASE("store counts appended samples and flags resets") {
  StatsStore store;
  CHECK(store.append("sw1", entry(2, 100), 0) == stats::kCountersPerPort);
  CHECK(store.append("sw1", entry(2, 50), 0) == 0);
  CHECK(store.append("sw1", entry(2, 50), 15000) == stats::kCountersPerPort);
  CHECK(store.samples_appended() == 2 * stats::kCountersPerPort);
  const auto s = store.series({"sw1", 2}, Counter::kRxBytes);
  REQUIRE(s.size() == 2);
  CHECK(s[1].reset);
  CHECK(store.ports() == std::vector<PortKey>{{"sw1", 2}});
  CHECK(store.series_count() == stats::kCountersPerPort);
  CHECK(store.series({"sw9", 1}, Counter::kRxBytes).empty());
}

TEST_CASE("one poll of a 4-port dp appends 4 rows") {
  testing::Harness h(stock(), sim::star_topology(2));
  StatsStore store;
  stats::StatsPoller poller(h.ctl, store, h.clock);
  const auto r = poller.poll_once();
  CHECK(r.targets == 1);
  CHECK(r.succeeded == 1);
  CHECK(r.samples == 4 * stats::kCountersPerPort);
  CHECK(store.samples_appended() == 4 * stats::kCountersPerPort);
  CHECK(store.ports("sw1").size() == 4);
  const auto meta = store.scrape_meta().at("sw1");
  CHECK(meta.last_success);
  CHECK(meta.duration_s >= 0);
}

TEST_CASE("sample-counting law over 30 simulated seconds") {
  testing::Harness h(two_dp_config(), two_switches());
  StatsStore store;
  stats::StatsPoller poller(h.ctl, store, h.clock);
  h.fabric.on_tick([&](int64_t) { poller.poll_if_due(); });
  h.fabric.advance_ms(100);
  const size_t k = store.series_count();
  CHECK(k == 2 * 4 * stats::kCountersPerPort);
  const uint64_t before = store.samples_appended();
  CHECK(before == k);
  h.fabric.advance(30);
  CHECK(store.samples_appended() - before == 2 * k);
  CHECK(poller.cycles() == 3);
}

TEST_CASE("a stalled dp fails alone") {
  controller::ControllerOptions opt;
  opt.stats_timeout = std::chrono::milliseconds(100);
  testing::Harness h(two_dp_config(), two_switches(), opt, false);
  sim::SwitchTestOptions stall;
  stall.stall_stats = true;
  h.fabric.set_switch_options("sw2", stall);
  h.fabric.connect(h.ctl);
  StatsStore store;
  stats::StatsPoller poller(h.ctl, store, h.clock);
  const auto r = poller.poll_once();
  CHECK(r.targets == 2);
  CHECK(r.succeeded == 1);
  const auto meta = store.scrape_meta();
  CHECK(meta.at("sw1").last_success);
  CHECK_FALSE(meta.at("sw2").last_success);
  CHECK(meta.at("sw2").failures == 1);
  CHECK(store.ports("sw1").size() == 4);
  CHECK(store.ports("sw2").empty());
}

TEST_CASE("unconnected dps count as failed scrapes") {
  testing::Harness h(two_dp_config(), two_switches(), {}, false);
  h.fabric.connect("sw1", h.ctl);
  StatsStore store;
  stats::StatsPoller poller(h.ctl, store, h.clock);
  poller.poll_once();
  CHECK(store.scrape_meta().at("sw1").last_success);
  CHECK_FALSE(store.scrape_meta().at("sw2").last_success);
}

TEST_CASE("rates track the generator within 1%") {
  auto cfg = stock();
  testing::Harness h(cfg, sim::star_topology(2));
  h.fabric.announce_hosts();
  StatsStore store;
  stats::StatsPoller poller(h.ctl, store, h.clock);
  h.fabric.on_tick([&](int64_t) { poller.poll_if_due(); });
  sim::FlowSpec f;
  f.name = "bulk";
  f.src = "AS2";
  f.dst = "AS1";
  f.pps = 100000;
  f.bytes = 1250;
  f.ip_proto = 6;
  f.start_ms = h.fabric.now_ms();
  h.fabric.add_flow(f);
  h.fabric.advance(60);
  const auto in = stats::compute_rates(store, {"sw1", 2}, 60, *store.latest_sample_ms());
  const auto out = stats::compute_rates(store, {"sw1", 1}, 60, *store.latest_sample_ms());
  REQUIRE(in.bits_in_per_sec);
  REQUIRE(in.pkts_in_per_sec);
  REQUIRE(out.bits_out_per_sec);
  CHECK(std::abs(*in.bits_in_per_sec - 1.0e9) / 1.0e9 <= 0.01);
  CHECK(std::abs(*in.pkts_in_per_sec - 1.0e5) / 1.0e5 <= 0.01);
  CHECK(std::abs(*out.bits_out_per_sec - 1.0e9) / 1.0e9 <= 0.01);
  CHECK(*in.drops_in_per_sec == 0);
}

TEST_CASE("empty store renders only self-metrics") {
  StatsStore store;
  const auto text = stats::render_exposition(store, stats::ProcessStats{0.5, 1 << 20, 1 << 24});
  const auto doc = testing::check_exposition(text);
  CHECK(doc.problems.empty());
  CHECK(doc.names() == std::set<std::string>{"process_cpu_percent", "process_resident_memory_bytes",
                                             "process_virtual_memory_bytes", "sdx_samples_appended_total"});
  CHECK(doc.find("process_resident_memory_bytes") == 1 << 20);
}

TEST_CASE("exposition rows for one port") {
  StatsStore store;
  store.append("sw1", entry(2, 0, 0), 0);
  store.append("sw1", entry(2, 125000000, 100000), 1000);
  store.record_scrape("sw1", 0.004, true, 1000);
  const auto text = stats::render_exposition(store, {});
  CHECK(text.find("sdx_port_rx_bytes_total{dp=\"sw1\",port=\"2\"} 125000000\n") != std::string::npos);
  const auto doc = testing::check_exposition(text);
  for (const auto& p : doc.problems) INFO(p);
  CHECK(doc.problems.empty());
  const std::map<std::string, std::string> labels{{"dp", "sw1"}, {"port", "2"}};
  CHECK(doc.find("sdx_port_bits_in_per_second", labels) == 1.0e9);
  CHECK(doc.find("sdx_port_packets_in_per_second", labels) == 1.0e5);
  CHECK(doc.find("sdx_port_rx_packets_total", labels) == 100000);
  CHECK(doc.find("sdx_scrape_duration_seconds", {{"dp", "sw1"}}) == doctest::Approx(0.004));
  CHECK(doc.find("sdx_scrape_last_success", {{"dp", "sw1"}}) == 1);
  CHECK(doc.find("sdx_samples_appended_total") == 16);
  CHECK(doc.types.at("sdx_port_rx_bytes_total") == "counter");
  CHECK(doc.types.at("sdx_port_bits_in_per_second") == "gauge");
  CHECK(stats::render_exposition(store, {}) == text);
}

TEST_CASE("exposition ordering and escaping") {
  StatsStore store;
  store.append("b\"q", entry(10, 1), 0);
  store.append("a\\x", entry(2, 1), 0);
  store.append("a\\x", entry(1, 1), 0);
  store.record_scrape("line\nbreak", 0, false, 0);
  const auto text = stats::render_exposition(store, {});
  const auto doc = testing::check_exposition(text);
  CHECK(doc.problems.empty());
  std::vector<std::string> order;
  for (const auto& s : doc.samples) {
    if (s.name == "sdx_port_rx_bytes_total") order.push_back(s.labels.at("dp") + "/" + s.labels.at("port"));
  }
  CHECK(order == std::vector<std::string>{"a\\x/1", "a\\x/2", "b\"q/10"});
  CHECK(doc.find("sdx_scrape_last_success", {{"dp", "line\nbreak"}}) == 0);
  std::string prev;
  for (const auto& [name, type] : doc.types) {
    CHECK(prev < name);
    prev = name;
  }
}

TEST_CASE("checker rejects malformed documents") {
  CHECK_FALSE(testing::check_exposition("x 1\n").problems.empty());
  CHECK_FALSE(testing::check_exposition("# TYPE x gauge\nx{a=\"1\"} 1\nx{b=\"1\"} 2\n").problems.empty());
  CHECK_FALSE(testing::check_exposition("# TYPE x gauge\nx 1\n# TYPE y gauge\ny 1\nx 2\n").problems.empty());
  CHECK_FALSE(testing::check_exposition("# TYPE x_total counter\nx_total one\n").problems.empty());
  CHECK_FALSE(testing::check_exposition("# TYPE x counter\nx 1\n").problems.empty());
  CHECK_FALSE(testing::check_exposition("# TYPE x gauge\nx{a=\"1\",} 1\n").problems.empty());
  CHECK_FALSE(testing::check_exposition("# TYPE x gauge\nx 1").problems.empty());
  CHECK(testing::check_exposition("# HELP x h\n# TYPE x gauge\nx{a=\"\\\"\"} +Inf\n").problems.empty());
}

TEST_CASE("format_sample_value") {
  CHECK(stats::format_sample_value(125000000) == "125000000");
  CHECK(stats::format_sample_value(0.25) == "0.25");
  CHECK(stats::format_sample_value(-3) == "-3");
  CHECK(stats::format_sample_value(std::nan("")) == "NaN");
  CHECK(stats::format_sample_value(HUGE_VAL) == "+Inf");
}

TEST_CASE("process sampler reads /proc") {
  stats::ProcessSampler sampler;
  const auto first = sampler.sample();
  CHECK(first.resident_bytes > 0);
  CHECK(first.virtual_bytes >= first.resident_bytes);
  CHECK(first.cpu_percent == 0);
  volatile double x = 0;
  for (int i = 0; i < 3000000; ++i) x = x + i;
  CHECK(sampler.sample().cpu_percent >= 0);
}

TEST_CASE("poll loop heartbeat stops with the loop") {
  auto clock = std::make_shared<SteadyClock>();
  controller::Controller ctl(stock(), clock);
  StatsStore store;
  stats::StatsPoller poller(ctl, store, clock, {1000});
  CHECK(poller.last_heartbeat_ms() == -1);
  poller.start();
  CHECK(poller.running());
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  CHECK(poller.cycles() >= 1);
  const int64_t beat = poller.last_heartbeat_ms();
  CHECK(clock->now_ms() - beat < 1000);
  poller.stop();
  CHECK_FALSE(poller.running());
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  CHECK(poller.last_heartbeat_ms() - beat < 300);
  CHECK(store.scrape_meta().at("sw1").failures >= 1);
}
