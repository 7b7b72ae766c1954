// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are the
// constants below; nothing here is tuned to the implementation.

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "sdx/cli/cli.h"
#include "sdx/config/emit.h"
#include "sdx/config/parse.h"
#include "sdx/config/validate.h"
#include "sdx/openflow/codec.h"
#include "sdx/rules/compiler.h"
#include "sdx/service/service.h"
#include "sdx/sim/fabric.h"
#include "sdx/stats/poller.h"
#include "support/api_fixture.h"
#include "support/golden.h"
#include "support/harness.h"
#include "support/of_gen.h"
#include "support/raw_peer.h"

using namespace sdx;
using nlohmann::json;

namespace {

// Criterion 1
constexpr double kFidelityBudgetS = 1.0;
// Criterion 2 and 8
constexpr double kAclSimSeconds = 60;
constexpr double kAclBudgetS = 10.0;
constexpr uint64_t kAclPps = 1000;
// Criterion 3 and 8
constexpr uint64_t kRatePps = 100000;
constexpr uint32_t kRateFrameBytes = 1250;
constexpr double kRateSimSeconds = 60;
constexpr double kRateTolerance = 0.01;
constexpr double kExpectedBitsPerSec = 1.0e9;
constexpr double kExpectedPktsPerSec = 1.0e5;
// Criterion 4
constexpr int kScrapeDps = 4;
constexpr uint32_t kScrapePorts = 8;
constexpr int64_t kScrapeIntervalMs = 15000;
constexpr size_t kScrapeMinCycles = 40;
constexpr double kScrapeP95BudgetS = 0.025;
// Criterion 5
constexpr int64_t kCountIntervalMs = 15000;
constexpr int64_t kCountWindowMs = 30000;
// Criterion 7
constexpr int kCodecRoundTrips = 10000;
constexpr int kFuzzInputs = 10000;
constexpr size_t kFuzzMaxBytes = 64 * 1024;
constexpr size_t kGoldenFrames = 5;
// Criterion 9
constexpr auto kLivenessBudget = std::chrono::seconds(5);

struct Checks {
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  bool expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
    return ok;
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt_double(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string config_path(const std::string& name) { return std::string(SDX_CONFIG_DIR) + "/" + name; }

sim::TopologySpec topology_without_flows(const std::string& file) {
  auto spec = sim::load_topology_file(config_path(file));
  spec.flows.clear();
  return spec;
}

sim::FlowSpec flow(std::string name, std::string src, std::string dst, uint64_t pps, uint32_t bytes,
                   uint16_t eth_type, std::optional<uint8_t> ip_proto) {
  sim::FlowSpec f;
  f.name = std::move(name);
  f.src = std::move(src);
  f.dst = std::move(dst);
  f.pps = pps;
  f.bytes = bytes;
  f.eth_type = eth_type;
  f.ip_proto = ip_proto;
  return f;
}

const of::PortStatsEntry* find_port(const std::vector<of::PortStatsEntry>& ports, uint32_t port) {
  for (const auto& p : ports) {
    if (p.port_no == port) return &p;
  }
  return nullptr;
}

uint64_t tx_packets(const sim::SimFabric& f, uint64_t dp, uint32_t port) {
  const auto ports = f.port_counters(dp);
  const auto* p = find_port(ports, port);
  return p ? p->tx_packets : 0;
}

uint64_t class_count(const sim::HostLedger& h, uint16_t eth_type, std::optional<uint8_t> proto) {
  auto it = h.received_by_class.find({eth_type, proto});
  return it == h.received_by_class.end() ? 0 : it->second;
}

const sim::HostSpec* host_on(const sim::TopologySpec& topo, uint32_t port) {
  for (const auto& h : topo.hosts) {
    if (h.port == port) return &h;
  }
  return nullptr;
}

// 1. The verbatim document parses, emit/parse is identity, gen-acl mirror
// reproduces its ACL block.
void fidelity(Checks& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto text = testing::stock_verbatim_text();
  config::ParsedDocument doc;
  try {
    doc = config::parse_document(text);
  } catch (const config::ConfigError& e) {
    c.expect(false, std::string("verbatim document rejected: ") + e.what());
    return;
  }
  c.expect(config::validate(doc.config).ok(), "verbatim document fails validation");
  const auto emitted = config::emit_config(doc.config);
  c.expect(config::parse_config(emitted) == doc.config, "emit then parse is not identity");
  c.expect(config::emit_config(config::parse_config(emitted)) == emitted, "emit is not a fixed point");

  std::ostringstream out, err;
  const int rc = cli::sdxctl_main({"gen-acl", "mirror", "--to", "4", "--ipv4-icmp", "--ipv6-icmp", "--allow-all"},
                                  out, err);
  c.expect(rc == cli::kExitOk, "gen-acl exited " + std::to_string(rc) + ": " + err.str());
  auto with_generated = emitted.substr(0, emitted.find("acls:")) + out.str();
  try {
    const auto generated = config::parse_config(with_generated);
    c.expect(generated.acls == doc.config.acls, "gen-acl output differs from the document's ACLs");
  } catch (const config::ConfigError& e) {
    c.expect(false, std::string("gen-acl output does not parse: ") + e.what());
  }
  const double took = seconds_since(t0);
  c.expect(took < kFidelityBudgetS, "took " + fmt_double(took) + " s");
  c.note("runtime " + fmt_double(took) + " s");
}

// 2 and 8. Mirror, allow, block and redirect, exact counts.
void acl_suite(Checks& c, const std::string& topo_file) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto topo = topology_without_flows(topo_file);
  const uint64_t expected_sent = static_cast<uint64_t>(kAclPps * kAclSimSeconds);
  const auto stock = config::parse_config(testing::stock_text());
  const uint32_t mirror_port = 4;

  {
    testing::Harness h(stock, topo);
    h.fabric.announce_hosts();
    h.fabric.add_flow(flow("icmp4", "AS2", "AS1", kAclPps, 98, 0x0800, 1));
    h.fabric.add_flow(flow("icmp6", "AS2", "AS1", kAclPps, 118, 0x86dd, 58));
    h.fabric.add_flow(flow("tcp", "AS2", "AS1", kAclPps, 1500, 0x0800, 6));
    const uint64_t mirror_tx0 = tx_packets(h.fabric, 0x1, mirror_port);
    h.fabric.advance(kAclSimSeconds);

    for (const char* name : {"icmp4", "icmp6"}) {
      const auto l = h.fabric.flow_ledger(name);
      const std::string n = name;
      c.expect(l.sent == expected_sent, n + " sent " + std::to_string(l.sent));
      c.expect(l.mirrored == l.sent, n + " mirrored " + std::to_string(l.mirrored) + " of " + std::to_string(l.sent));
      c.expect(l.delivered == 0, n + " delivered " + std::to_string(l.delivered));
      c.expect(l.conserved(), n + " ledger not conserved");
    }
    const auto tcp = h.fabric.flow_ledger("tcp");
    c.expect(tcp.sent == expected_sent, "tcp sent " + std::to_string(tcp.sent));
    c.expect(tcp.delivered == tcp.sent, "tcp delivered " + std::to_string(tcp.delivered));
    c.expect(tcp.mirrored == 0, "tcp mirrored " + std::to_string(tcp.mirrored));
    c.expect(tcp.conserved(), "tcp ledger not conserved");

    c.expect(tx_packets(h.fabric, 0x1, mirror_port) - mirror_tx0 == 2 * expected_sent,
             "mirror port tx " + std::to_string(tx_packets(h.fabric, 0x1, mirror_port) - mirror_tx0));
    const auto as1 = h.fabric.host_ledger("AS1");
    c.expect(class_count(as1, 0x0800, 1) == 0, "AS1 received ICMPv4");
    c.expect(class_count(as1, 0x86dd, 58) == 0, "AS1 received ICMPv6");
    c.expect(class_count(as1, 0x0800, 6) == expected_sent, "AS1 tcp " + std::to_string(class_count(as1, 0x0800, 6)));
    if (const auto* m = host_on(topo, mirror_port)) {
      const auto mh = h.fabric.host_ledger(m->name);
      c.expect(class_count(mh, 0x0800, 1) == expected_sent, m->name + " ICMPv4 copies");
      c.expect(class_count(mh, 0x86dd, 58) == expected_sent, m->name + " ICMPv6 copies");
      c.expect(class_count(mh, 0x0800, 6) == 0, m->name + " received tcp");
    }
  }

  {
    // Port 1: UDP blocked, TCP redirected to port 3, the rest allowed.
    auto cfg = stock;
    config::AclRule block;
    block.match.dl_type = 0x0800;
    block.match.ip_proto = 17;
    config::AclRule redirect;
    redirect.match.dl_type = 0x0800;
    redirect.match.ip_proto = 6;
    redirect.actions.redirect = 3;
    config::AclRule allow;
    allow.actions.allow = true;
    cfg.acls["edge"] = {block, redirect, allow};
    cfg.dps.begin()->second.interfaces.at(1).acls_in = {"edge"};
    testing::Harness h(cfg, topo);
    h.fabric.announce_hosts();
    h.fabric.add_flow(flow("udp", "AS1", "AS2", kAclPps, 200, 0x0800, 17));
    h.fabric.add_flow(flow("tcp", "AS1", "AS2", kAclPps, 200, 0x0800, 6));
    h.fabric.add_flow(flow("icmp", "AS1", "AS2", kAclPps, 200, 0x0800, 1));
    const uint64_t p3_tx0 = tx_packets(h.fabric, 0x1, 3);
    h.fabric.advance(kAclSimSeconds);

    const auto udp = h.fabric.flow_ledger("udp");
    c.expect(udp.sent == expected_sent && udp.dropped == udp.sent, "udp dropped " + std::to_string(udp.dropped));
    c.expect(udp.delivered + udp.redirected + udp.mirrored + udp.flooded == 0, "udp leaked");
    const auto tcp = h.fabric.flow_ledger("tcp");
    c.expect(tcp.sent == expected_sent && tcp.redirected == tcp.sent,
             "tcp redirected " + std::to_string(tcp.redirected));
    c.expect(tcp.delivered + tcp.dropped + tcp.mirrored + tcp.flooded == 0, "tcp leaked");
    c.expect(tx_packets(h.fabric, 0x1, 3) - p3_tx0 == expected_sent,
             "redirect port tx " + std::to_string(tx_packets(h.fabric, 0x1, 3) - p3_tx0));
    const auto as2 = h.fabric.host_ledger("AS2");
    c.expect(class_count(as2, 0x0800, 6) == 0, "AS2 received redirected tcp");
    c.expect(class_count(as2, 0x0800, 17) == 0, "AS2 received blocked udp");
    c.expect(class_count(as2, 0x0800, 1) == expected_sent, "AS2 icmp " + std::to_string(class_count(as2, 0x0800, 1)));
    if (const auto* r = host_on(topo, 3)) {
      c.expect(class_count(h.fabric.host_ledger(r->name), 0x0800, 6) == expected_sent, r->name + " redirected tcp");
    }
    for (const auto& l : h.fabric.flow_ledgers()) c.expect(l.conserved(), l.name + " ledger not conserved");
  }
  const double took = seconds_since(t0);
  c.expect(took < kAclBudgetS, "took " + fmt_double(took) + " s");
  c.note(std::to_string(topo.hosts.size()) + " hosts, " + fmt_double(took) + " s for 2 x " +
         fmt_double(kAclSimSeconds) + " simulated s");
}

// 3 and 8. Reported rates for a 1 Gbps, 100k pps generator.
void rate_envelope(Checks& c, const std::string& topo_file, const std::string& dst) {
  testing::Harness h(config::parse_config(testing::stock_text()), topology_without_flows(topo_file));
  stats::StatsStore store;
  stats::StatsPoller poller(h.ctl, store, h.clock);
  h.fabric.on_tick([&](int64_t) { poller.poll_if_due(); });
  h.fabric.announce_hosts();
  h.fabric.add_flow(flow("bulk", "AS1", dst, kRatePps, kRateFrameBytes, 0x0800, 6));
  h.fabric.advance(kRateSimSeconds);

  auto users = testing::dev_users();
  api::AdminApi admin(api::AdminApiDeps{h.ctl, store, users, testing::ApiFixture::status_fn()});
  api::Request req;
  req.method = "GET";
  req.path = "/stats/ports";
  req.query = {{"dp", "sw1"}, {"port", "1"}, {"window", fmt_double(kRateSimSeconds)}};
  req.headers["authorization"] = "Bearer admin-dev-token";
  const auto r = admin.handle(req);
  if (!c.expect(r.status == 200, "stats endpoint returned " + std::to_string(r.status))) return;
  const auto rates = json::parse(r.body)["rates"];
  if (!c.expect(!rates["bits_in_per_sec"].is_null() && !rates["pkts_in_per_sec"].is_null(), "rates undefined")) {
    return;
  }
  const double bits = rates["bits_in_per_sec"].get<double>();
  const double pkts = rates["pkts_in_per_sec"].get<double>();
  c.expect(std::abs(bits - kExpectedBitsPerSec) <= kRateTolerance * kExpectedBitsPerSec,
           "bits_in/s " + fmt_double(bits));
  c.expect(std::abs(pkts - kExpectedPktsPerSec) <= kRateTolerance * kExpectedPktsPerSec,
           "pkts_in/s " + fmt_double(pkts));
  c.expect(h.fabric.flow_ledger("bulk").delivered == h.fabric.flow_ledger("bulk").sent, "bulk flow not delivered");
  c.note("bits_in/s " + fmt_double(bits) + ", pkts_in/s " + fmt_double(pkts));
}

config::FabricConfig scale_config(int n_dps, uint32_t n_ports) {
  config::FabricConfig cfg;
  cfg.vlans["office"] = {"office", 100, ""};
  for (int d = 1; d <= n_dps; ++d) {
    config::DatapathConfig dp;
    dp.name = "sw" + std::to_string(d);
    dp.dp_id = static_cast<uint64_t>(d);
    for (uint32_t p = 1; p <= n_ports; ++p) dp.interfaces[p] = {"p" + std::to_string(p), "", "office", {}};
    cfg.dps[dp.name] = dp;
  }
  return cfg;
}

sim::TopologySpec scale_topology(int n_dps, uint32_t n_ports) {
  sim::TopologySpec topo;
  for (int d = 1; d <= n_dps; ++d) {
    topo.switches.push_back({"sw" + std::to_string(d), static_cast<uint64_t>(d), n_ports});
  }
  return topo;
}

// 4. p95 scrape duration over TCP loopback.
void scrape_budget(Checks& c) {
  auto clock = std::make_shared<ManualClock>();
  service::ServiceOptions o;
  o.bind_address = "127.0.0.1";
  o.control_port = 0;
  o.metrics_port = 0;
  o.admin_port = 0;
  o.tick_ms = 100;
  o.stats_interval_ms = kScrapeIntervalMs;
  service::Service svc(scale_config(kScrapeDps, kScrapePorts), testing::dev_users(), o, clock);
  svc.start();
  // Drive polls from the simulated clock instead of the wall-clock loop.
  svc.poller().stop();
  sim::SimFabric fabric(scale_topology(kScrapeDps, kScrapePorts), clock);
  fabric.connect_tcp("127.0.0.1", svc.control_port());
  for (int d = 1; d <= kScrapeDps; ++d) {
    c.expect(svc.controller().wait_for_state(static_cast<uint64_t>(d), controller::SessionState::kSteady,
                                             std::chrono::seconds(5)),
             "sw" + std::to_string(d) + " not steady");
  }
  std::vector<double> durations;
  size_t cycles = 0;
  size_t failed = 0;
  fabric.on_tick([&](int64_t) {
    if (auto r = svc.poller().poll_if_due()) {
      ++cycles;
      failed += r->targets - r->succeeded;
      durations.insert(durations.end(), r->durations_s.begin(), r->durations_s.end());
    }
  });
  fabric.advance_ms(kScrapeIntervalMs * static_cast<int64_t>(kScrapeMinCycles + 2));
  for (const auto& s : fabric.spec().switches) fabric.disconnect(s.name);
  svc.stop();

  c.expect(cycles >= kScrapeMinCycles, "only " + std::to_string(cycles) + " cycles");
  c.expect(failed == 0, std::to_string(failed) + " failed scrapes");
  if (!c.expect(!durations.empty(), "no scrape durations")) return;
  std::sort(durations.begin(), durations.end());
  const size_t idx = static_cast<size_t>(std::ceil(0.95 * static_cast<double>(durations.size()))) - 1;
  const double p95 = durations[idx];
  c.expect(p95 < kScrapeP95BudgetS, "p95 " + fmt_double(p95 * 1000) + " ms");
  c.note(std::to_string(cycles) + " cycles, " + std::to_string(durations.size()) + " scrapes, p95 " +
         fmt_double(p95 * 1000) + " ms, max " + fmt_double(durations.back() * 1000) + " ms");
}

// 5. samples_appended grows by exactly 2K over 30 s.
void counting_law(Checks& c) {
  const auto cfg = scale_config(2, 4);
  testing::Harness h(cfg, scale_topology(2, 4));
  stats::StatsStore store;
  stats::PollerOptions popt;
  popt.interval_ms = kCountIntervalMs;
  stats::StatsPoller poller(h.ctl, store, h.clock, popt);
  h.fabric.on_tick([&](int64_t) { poller.poll_if_due(); });
  h.fabric.advance_ms(100);
  const size_t k = store.series_count();
  const uint64_t before = store.samples_appended();
  c.expect(k > 0, "no series after the first poll");
  c.expect(before == k, "first poll appended " + std::to_string(before) + " for K=" + std::to_string(k));
  h.fabric.advance_ms(kCountWindowMs);
  const uint64_t grown = store.samples_appended() - before;
  c.expect(grown == 2 * k, "grew by " + std::to_string(grown) + ", want " + std::to_string(2 * k));
  c.note("K=" + std::to_string(k) + ", +" + std::to_string(grown) + " over " +
         std::to_string(kCountWindowMs / 1000) + " s");
}

// 6. Tables converge to the compiler's output; an unchanged apply sends
// nothing.
void convergence(Checks& c) {
  const auto base = config::parse_config(testing::stock_text());
  std::vector<config::FabricConfig> steps;
  {
    auto cfg = base;
    config::AclRule block;
    block.match.dl_type = 0x0800;
    block.match.ip_proto = 17;
    config::AclRule allow;
    allow.actions.allow = true;
    cfg.acls["no-udp"] = {block, allow};
    cfg.dps.at("sw1").interfaces.at(1).acls_in = {"no-udp"};
    steps.push_back(cfg);
  }
  {
    auto cfg = steps.back();
    cfg.vlans["transit"] = {"transit", 200, "transit"};
    cfg.dps.at("sw1").interfaces.at(3).native_vlan = "transit";
    cfg.dps.at("sw1").interfaces.at(4).native_vlan = "transit";
    config::AclRule redirect;
    redirect.match.dl_type = 0x0800;
    redirect.match.ip_proto = 6;
    redirect.actions.redirect = 3;
    cfg.acls["no-udp"].insert(cfg.acls["no-udp"].begin() + 1, redirect);
    steps.push_back(cfg);
  }
  {
    auto cfg = steps.back();
    cfg.dps.at("sw1").interfaces.erase(4);
    cfg.acls.erase("mirror");
    cfg.dps.at("sw1").interfaces.at(2).acls_in = {"allow-all"};
    steps.push_back(cfg);
  }
  steps.push_back(base);
  std::mt19937 rng(20261016);
  for (int i = 0; i < 20; ++i) {
    auto cfg = base;
    auto& ifaces = cfg.dps.at("sw1").interfaces;
    for (auto& [port, iface] : ifaces) {
      iface.acls_in.clear();
      if (rng() % 2) iface.acls_in.push_back(rng() % 2 ? "mirror" : "no-tcp");
      if (rng() % 3) iface.acls_in.push_back("allow-all");
    }
    config::AclRule drop_tcp;
    drop_tcp.match.dl_type = 0x0800;
    drop_tcp.match.ip_proto = 6;
    cfg.acls["no-tcp"] = {drop_tcp};
    if (rng() % 2) cfg.acls["mirror"][0].actions.mirror = 1 + rng() % 3;
    steps.push_back(cfg);
  }

  testing::Harness h(base, sim::star_topology(4));
  h.fabric.announce_hosts();
  h.fabric.add_flow(flow("bg", "AS1", "AS3", 50, 200, 0x0800, 6));
  const size_t scripted = 4;
  size_t applied = 0;
  for (size_t i = 0; i < steps.size(); ++i) {
    if (!config::validate(steps[i]).ok()) {
      c.expect(i >= scripted, "scripted step " + std::to_string(i) + " is invalid");
      continue;
    }
    const auto report = h.ctl.apply_config(steps[i]);
    c.expect(report.ok, "step " + std::to_string(i) + " apply failed");
    const auto want = rules::compile_datapath(steps[i], "sw1");
    c.expect(h.fabric.read_flow_table(0x1, true).same_entries(want),
             "step " + std::to_string(i) + " table differs from the compiler");
    h.fabric.advance(2);
    ++applied;
  }

  // Unchanged apply on a captured session.
  controller::Controller ctl(base, std::make_shared<ManualClock>());
  auto peer = testing::RawPeer::attach(ctl, {0x1, true, true});
  c.expect(ctl.dp_state(0x1) == controller::SessionState::kSteady, "captured session not steady");
  peer->clear();
  const auto report = ctl.apply_config(base);
  const auto mods = peer->received_of<of::FlowMod>().size();
  c.expect(report.ok, "unchanged apply failed");
  c.expect(mods == 0, "unchanged apply sent " + std::to_string(mods) + " FlowMods");
  c.note(std::to_string(applied) + " applies converged, unchanged apply sent " + std::to_string(mods) +
         " FlowMods");
}

// 7. Round trip, fuzz, golden frames.
void codec(Checks& c) {
  testing::OfGenerator gen(20261016);
  std::map<of::MsgType, int> seen;
  int round_trip_failures = 0;
  for (int i = 0; i < kCodecRoundTrips; ++i) {
    const auto m = gen.next();
    const auto r = of::decode(of::encode(m));
    if (!r.ok() || !(r.message() == m)) ++round_trip_failures;
    ++seen[m.type()];
  }
  c.expect(round_trip_failures == 0, std::to_string(round_trip_failures) + " round-trip mismatches");
  c.expect(seen.size() == 14, "generator covered " + std::to_string(seen.size()) + " message types");

  std::mt19937_64 rng(64);
  testing::OfGenerator mutate(65);
  int crashes = 0;
  int decoded = 0;
  for (int i = 0; i < kFuzzInputs; ++i) {
    std::vector<uint8_t> input;
    if (i % 2 == 0) {
      input.resize(std::uniform_int_distribution<size_t>(0, kFuzzMaxBytes)(rng));
      for (auto& b : input) b = static_cast<uint8_t>(rng());
      if (i % 4 == 0 && input.size() >= 8) {
        input[0] = of::kVersion;
        input[2] = static_cast<uint8_t>(std::min<size_t>(input.size(), 0xffff) >> 8);
        input[3] = static_cast<uint8_t>(std::min<size_t>(input.size(), 0xffff));
      }
    } else {
      input = of::encode(mutate.next());
      for (int k = 0; k < 4; ++k) input[rng() % input.size()] ^= static_cast<uint8_t>(1u << (rng() % 8));
      if (rng() % 3 == 0) input.resize(rng() % (input.size() + 1));
    }
    try {
      if (of::decode(input).ok()) ++decoded;
    } catch (...) {
      ++crashes;
    }
  }
  c.expect(crashes == 0, std::to_string(crashes) + " inputs escaped the decoder");

  auto golden = testing::golden_frames();
  c.expect(golden.size() == kGoldenFrames, std::to_string(golden.size()) + " golden frames on disk");
  size_t matched = 0;
  for (const auto& [name, msg] : testing::golden_messages()) {
    auto it = golden.find(name);
    if (!c.expect(it != golden.end(), "missing golden frame " + name)) continue;
    const bool enc = of::encode(msg) == it->second;
    const auto dec = of::decode(it->second);
    const bool ok = enc && dec.ok() && dec.message() == msg;
    c.expect(ok, "golden frame " + name + " differs");
    matched += ok;
  }
  c.note(std::to_string(kCodecRoundTrips) + " round trips over " + std::to_string(seen.size()) + " types, " +
         std::to_string(kFuzzInputs) + " fuzz inputs (" + std::to_string(decoded) + " decoded), " +
         std::to_string(matched) + "/" + std::to_string(kGoldenFrames) + " golden frames");
}

// 9. Liveness over the real HTTP endpoints.
void liveness(Checks& c) {
  service::ServiceOptions o;
  o.bind_address = "127.0.0.1";
  o.control_port = 0;
  o.metrics_port = 0;
  o.admin_port = 0;
  o.stats_interval_ms = 1000;
  o.tick_ms = 100;
  service::Service svc(config::parse_config(testing::stock_text()), testing::dev_users(), o);
  svc.start();
  httplib::Client client("127.0.0.1", svc.admin_port());
  const httplib::Headers auth = {{"Authorization", "Bearer noc-dev-token"}};
  auto status = [&]() -> std::optional<json> {
    auto r = client.Get("/status", auth);
    if (!r || r->status != 200) return std::nullopt;
    return json::parse(r->body);
  };

  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  const auto s = status();
  if (!c.expect(s.has_value(), "GET /status failed")) {
    svc.stop();
    return;
  }
  std::set<std::string> listening;
  for (const auto& e : (*s)["endpoints"]) {
    if (e["listening"] == true && e["port"].get<int>() > 0) listening.insert(e["name"].get<std::string>());
  }
  c.expect(listening == std::set<std::string>{"control", "metrics", "admin"}, "endpoints not all listening");
  c.expect((*s)["resident_memory_bytes"].get<uint64_t>() > 0, "resident memory missing");
  c.expect((*s)["virtual_memory_bytes"].get<uint64_t>() > 0, "virtual memory missing");
  c.expect((*s)["cpu_percent"].is_number() && (*s)["cpu_percent"].get<double>() >= 0, "cpu_percent missing");
  c.expect((*s)["roles"]["stats_poller"] == true, "stats_poller not live before the kill");

  svc.poller().stop();
  const auto t0 = std::chrono::steady_clock::now();
  bool flipped = false;
  while (std::chrono::steady_clock::now() - t0 < kLivenessBudget) {
    const auto now = status();
    if (now && (*now)["roles"]["stats_poller"] == false) {
      flipped = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  const double took = seconds_since(t0);
  c.expect(flipped, "stats_poller still live after " + fmt_double(took) + " s");
  const auto after = status();
  c.expect(after && (*after)["roles"]["controller"] == true, "controller role dropped");
  svc.stop();
  c.note("flip after " + fmt_double(took) + " s, rss " +
         std::to_string((*s)["resident_memory_bytes"].get<uint64_t>()) + " B, cpu " +
         fmt_double((*s)["cpu_percent"].get<double>()) + "%");
}

// 10. The documented role matrix, cell by cell.
void role_matrix(Checks& c) {
  const auto rows = testing::documented_matrix();
  c.expect(rows.size() > 0, "no matrix rows in docs/api.md");
  size_t served = 0;
  for (const auto& route : api::routes()) served += route.methods.size();
  c.expect(served == rows.size(), "documented " + std::to_string(rows.size()) + " rows, API serves " +
                                      std::to_string(served));
  size_t cells = 0;
  for (const auto& route : api::routes()) {
    for (const auto& verb : testing::kVerbs) {
      auto it = std::find_if(rows.begin(), rows.end(), [&](const testing::MatrixRow& r) {
        return r.pattern == route.pattern && r.method == verb;
      });
      for (auto role : api::kAllRoles) {
        const char want = it == rows.end() ? '-' : it->grant.at(role);
        const std::string cell = std::string(api::role_name(role)) + " " + verb + " " + route.pattern;
        c.expect(api::access(role, route.pattern, verb) == testing::expected_access(want), cell + " access()");
        testing::ApiFixture f;
        const auto r = f.call(verb, testing::concrete_path(route.pattern), testing::role_tokens().at(role),
                              testing::sample_body(verb, route.pattern), testing::sample_query(route.pattern));
        c.expect(testing::status_matches_grant(want, r.status), cell + " -> " + std::to_string(r.status));
        ++cells;
      }
    }
  }

  // as2 owns sw1/2 only.
  testing::ApiFixture f;
  size_t cross = 0;
  for (const char* dp : {"sw1", "sw2", "nope"}) {
    for (uint32_t port = 0; port <= 8; ++port) {
      if (std::string(dp) == "sw1" && port == 2) continue;
      for (const char* window : {"", "5", "bogus"}) {
        std::map<std::string, std::string> q = {{"dp", dp}, {"port", std::to_string(port)}};
        if (*window) q["window"] = window;
        const auto r = f.call("GET", "/stats/ports", "as2-dev-token", "", q);
        c.expect(r.status == 403, std::string("customer cross-port ") + dp + "/" + std::to_string(port) + " -> " +
                                      std::to_string(r.status));
        ++cross;
      }
    }
  }
  c.note(std::to_string(cells) + " cells, " + std::to_string(cross) + " cross-port probes");
}

struct Criterion {
  int id;
  std::string title;
  std::function<void(Checks&)> run;
};

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  const std::vector<Criterion> criteria = {
      {1, "config fidelity", fidelity},
      {2, "ACL behaviour, two-node", [](Checks& c) { acl_suite(c, "two-node.yaml"); }},
      {3, "rate envelope, two-node", [](Checks& c) { rate_envelope(c, "two-node.yaml", "AS2"); }},
      {4, "scrape budget", scrape_budget},
      {5, "sample-counting law", counting_law},
      {6, "convergence and no churn", convergence},
      {7, "codec", codec},
      {8, "four-node scale-out",
       [](Checks& c) {
         acl_suite(c, "four-node.yaml");
         rate_envelope(c, "four-node.yaml", "AS3");
       }},
      {9, "status liveness", liveness},
      {10, "role matrix", role_matrix},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Checks c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double took = seconds_since(t0);
    const bool pass = c.failures.empty();
    failed += !pass;
    std::cout << "criterion " << cr.id << " " << (pass ? "PASS" : "FAIL") << "  " << cr.title << " ("
              << fmt_double(took) << " s)";
    for (const auto& n : c.notes) std::cout << "; " << n;
    std::cout << "\n";
    const size_t shown = std::min<size_t>(c.failures.size(), 10);
    for (size_t i = 0; i < shown; ++i) std::cout << "    " << c.failures[i] << "\n";
    if (c.failures.size() > shown) std::cout << "    ... " << c.failures.size() - shown << " more\n";
  }
  std::cout << (criteria.size() - static_cast<size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
