#include <doctest.h>

#include <random>
#include <thread>

#include "sdx/config/parse.h"
#include "sdx/rules/compiler.h"
#include "sdx/rules/plan.h"
#include "support/acl_oracle.h"
#include "support/fixtures.h"
#include "support/harness.h"
#include "support/of_gen.h"
#include "support/raw_peer.h"

using namespace sdx;
using controller::ControllerOptions;
using controller::DpApplyResult;
using controller::SessionState;
using testing::RawPeer;

namespace {

config::FabricConfig stock() { return config::parse_config(testing::stock_text()); }

config::FabricConfig stock_with_block() {
  auto cfg = stock();
  config::AclRule rule;
  rule.match.dl_type = 0x0800;
  rule.match.ip_proto = 17;
  cfg.acls["block-udp"] = {rule};
  cfg.dps.at("sw1").interfaces.at(3).acls_in = {"block-udp"};
  return cfg;
}

const char* kTwoDps = R"(
vlans:
  office:
    vid: 100
dps:
  sw1:
    dp_id: 0x1
    interfaces:
      1: {name: AS1, native_vlan: office}
      2: {name: AS2, native_vlan: office}
  sw2:
    dp_id: 0x2
    interfaces:
      1: {name: AS3, native_vlan: office}
      2: {name: AS4, native_vlan: office}
)";

const char* kThreePorts = R"(
vlans:
  office:
    vid: 100
dps:
  sw1:
    dp_id: 0x1
    interfaces:
      1: {name: A, native_vlan: office}
      2: {name: B, native_vlan: office}
      3: {name: C, native_vlan: office}
)";

sim::TopologySpec two_switches() {
  sim::TopologySpec t;
  t.switches = {{"sw1", 0x1, 2}, {"sw2", 0x2, 2}};
  t.hosts = {{"AS1", "sw1", 1, of::MacAddress::from_u64(0x0e0000000001), "office"},
             {"AS2", "sw1", 2, of::MacAddress::from_u64(0x0e0000000002), "office"},
             {"AS3", "sw2", 1, of::MacAddress::from_u64(0x0e0000000003), "office"},
             {"AS4", "sw2", 2, of::MacAddress::from_u64(0x0e0000000004), "office"}};
  return t;
}

of::PacketIn packet_in(uint32_t port, of::MacAddress src, of::MacAddress dst) {
  of::PacketIn pi;
  pi.match.in_port = port;
  pi.frame.insert(pi.frame.end(), dst.bytes.begin(), dst.bytes.end());
  pi.frame.insert(pi.frame.end(), src.bytes.begin(), src.bytes.end());
  pi.frame.push_back(0x08);
  pi.frame.push_back(0x00);
  pi.frame.resize(60, 0);
  pi.total_len = 60;
  return pi;
}

std::shared_ptr<RawPeer> steady_peer(controller::Controller& ctl, uint64_t dp_id) {
  auto peer = RawPeer::attach(ctl, {dp_id, true, true});
  REQUIRE(ctl.dp_state(dp_id) == SessionState::kSteady);
  peer->clear();
  return peer;
}

}  // namespace

TEST_CASE("handshake reaches STEADY with the compiled table installed") {
  testing::Harness h(stock(), sim::star_topology(4));
  CHECK(h.ctl.dp_state(0x1) == SessionState::kSteady);
  const auto expected = rules::compile_datapath(stock(), "sw1");
  CHECK(h.fabric.read_flow_table(0x1).same_entries(expected));
  REQUIRE(h.ctl.pushed_table(0x1));
  CHECK(h.ctl.pushed_table(0x1)->same_entries(expected));
  auto sessions = h.ctl.sessions();
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0].dp_name == "sw1");
  CHECK(sessions[0].version == of::kVersion);
}

TEST_CASE("sync wipes foreign state first") {
  auto clock = std::make_shared<ManualClock>();
  controller::Controller ctl(stock(), clock);
  auto peer = RawPeer::attach(ctl, {0x1, true, true});
  auto mods = peer->received_of<of::FlowMod>();
  REQUIRE(!mods.empty());
  CHECK(mods.front() == rules::wipe_flow_mod());
  CHECK(mods.size() == rules::compile_datapath(stock(), "sw1").entries.size() + 1);
  CHECK(peer->received_of<of::BarrierRequest>().size() == 1);
}

TEST_CASE("unknown dp_id is rejected and gets no flows") {
  testing::Harness h(stock(), sim::star_topology(2), {}, false);
  h.fabric.set_switch_options("sw1", {false, 0x99, false, false});
  h.fabric.connect("sw1", h.ctl);
  CHECK(h.ctl.rejected_dp_ids() == std::vector<uint64_t>{0x99});
  CHECK(h.fabric.switch_counters("sw1").flow_mods == 0);
  CHECK_FALSE(h.fabric.connected("sw1"));
  CHECK(h.ctl.steady_dps().empty());
  CHECK(h.ctl.counters().rejected_sessions == 1);
}

TEST_CASE("an OpenFlow 1.0 peer is refused") {
  testing::Harness h(stock(), sim::star_topology(2), {}, false);
  h.fabric.set_switch_options("sw1", {true, std::nullopt, false, false});
  h.fabric.connect("sw1", h.ctl);
  auto sessions = h.ctl.sessions();
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0].state == SessionState::kDead);
  CHECK(sessions[0].dead_reason.find("hello failed") != std::string::npos);
  CHECK_FALSE(h.fabric.connected("sw1"));
  CHECK(h.fabric.switch_counters("sw1").flow_mods == 0);
}

TEST_CASE("hello without 1.3 in the version bitmap is refused") {
  auto clock = std::make_shared<ManualClock>();
  controller::Controller ctl(stock(), clock);
  auto peer = RawPeer::attach(ctl, {});
  peer->send(1, of::Hello{{0x00, 0x01, 0x00, 0x08, 0x00, 0x00, 0x00, 0x02}});
  auto errors = peer->received_of<of::Error>();
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].type == of::error::kHelloFailed);
  CHECK(peer->closed());
}

TEST_CASE("echo keeps a session alive and silence kills it") {
  testing::Harness h(stock(), sim::star_topology(2));
  h.fabric.advance(60);
  CHECK(h.ctl.dp_state(0x1) == SessionState::kSteady);
  REQUIRE(h.ctl.sessions()[0].echo_rtt_ms);
  CHECK(*h.ctl.sessions()[0].echo_rtt_ms == 0);
  CHECK(h.ctl.last_heartbeat_ms() == 60000);

  auto clock = std::make_shared<ManualClock>();
  controller::Controller ctl(stock(), clock);
  auto peer = steady_peer(ctl, 0x1);
  peer->set_auto_echo(false);
  for (int i = 1; i <= 30; ++i) {
    clock->set(i * 1000);
    ctl.tick();
    if (i < 15) CHECK(ctl.dp_state(0x1) == SessionState::kSteady);
  }
  CHECK_FALSE(ctl.dp_state(0x1).has_value());
  CHECK(ctl.sessions()[0].dead_reason == "echo timeout");
  CHECK(peer->closed());
  CHECK(peer->received_of<of::EchoRequest>().size() == 2);
}

TEST_CASE("handshake timeout") {
  auto clock = std::make_shared<ManualClock>();
  controller::Controller ctl(stock(), clock);
  auto peer = RawPeer::attach(ctl, {});
  clock->set(9999);
  ctl.tick();
  CHECK(ctl.sessions()[0].state == SessionState::kHandshake);
  clock->set(10000);
  ctl.tick();
  CHECK(ctl.sessions()[0].state == SessionState::kDead);
  CHECK(peer->closed());
}

TEST_CASE("apply: unchanged config sends nothing") {
  testing::Harness h(stock(), sim::star_topology(4));
  const auto before = h.fabric.switch_counters("sw1").flow_mods;
  auto report = h.ctl.apply_config(stock());
  CHECK(report.ok);
  REQUIRE(report.dps.size() == 1);
  CHECK(report.dps[0].added == 0);
  CHECK(report.dps[0].removed == 0);
  CHECK(h.fabric.switch_counters("sw1").flow_mods == before);
}

TEST_CASE("apply: a block ACL matches the plan and converges") {
  testing::Harness h(stock(), sim::star_topology(4));
  const auto old_table = rules::compile_datapath(stock(), "sw1");
  const auto new_table = rules::compile_datapath(stock_with_block(), "sw1");
  const auto plan = rules::plan_update(old_table, new_table);
  const auto before = h.fabric.switch_counters("sw1").flow_mods;
  auto report = h.ctl.apply_config(stock_with_block());
  CHECK(report.ok);
  REQUIRE(report.find("sw1"));
  CHECK(report.find("sw1")->outcome == DpApplyResult::Outcome::kApplied);
  CHECK(report.find("sw1")->added == plan.count(of::FlowModCommand::kAdd));
  CHECK(report.find("sw1")->removed == plan.count(of::FlowModCommand::kDeleteStrict));
  CHECK(h.fabric.switch_counters("sw1").flow_mods - before == plan.flow_mod_count());
  CHECK(h.fabric.read_flow_table(0x1).same_entries(new_table));
  CHECK(*h.ctl.active_config() == stock_with_block());
}

TEST_CASE("apply: invalid config throws and changes nothing") {
  testing::Harness h(stock(), sim::star_topology(4));
  auto bad = stock();
  bad.dps.at("sw1").interfaces.at(2).acls_in = {"missing"};
  CHECK_THROWS_AS(h.ctl.apply_config(bad), config::ConfigError);
  CHECK(*h.ctl.active_config() == stock());
}

TEST_CASE("apply: a disconnected dp is deferred and synced on connect") {
  auto cfg = config::parse_config(kTwoDps);
  testing::Harness h(cfg, two_switches(), {}, false);
  h.fabric.connect("sw1", h.ctl);
  auto next = cfg;
  config::AclRule drop_all;
  next.acls["deny"] = {drop_all};
  next.dps.at("sw2").interfaces.at(1).acls_in = {"deny"};
  next.dps.at("sw1").interfaces.at(2).acls_in = {"deny"};
  auto report = h.ctl.apply_config(next);
  CHECK(report.ok);
  CHECK(report.with_outcome(DpApplyResult::Outcome::kDeferred) == std::vector<std::string>{"sw2"});
  CHECK(report.with_outcome(DpApplyResult::Outcome::kApplied) == std::vector<std::string>{"sw1"});
  CHECK_THROWS_WITH_AS(h.fabric.read_flow_table(0x2), "no session", sim::SimError);
  h.fabric.connect("sw2", h.ctl);
  CHECK(h.ctl.dp_state(0x2) == SessionState::kSteady);
  CHECK(h.fabric.read_flow_table(0x2).same_entries(rules::compile_datapath(next, "sw2")));
  CHECK(h.fabric.read_flow_table(0x1).same_entries(rules::compile_datapath(next, "sw1")));
}

TEST_CASE("apply: a removed dp is wiped and disconnected") {
  auto cfg = config::parse_config(kTwoDps);
  testing::Harness h(cfg, two_switches());
  auto next = cfg;
  next.dps.erase("sw2");
  auto report = h.ctl.apply_config(next);
  CHECK(report.ok);
  CHECK(report.with_outcome(DpApplyResult::Outcome::kRemoved) == std::vector<std::string>{"sw2"});
  CHECK_FALSE(h.fabric.connected("sw2"));
  CHECK(h.ctl.steady_dps() == std::vector<uint64_t>{0x1});
}

TEST_CASE("apply: barrier timeout rolls back") {
  ControllerOptions opt;
  opt.barrier_timeout = std::chrono::milliseconds(100);
  testing::Harness h(stock(), sim::star_topology(4), opt);
  h.fabric.set_switch_options("sw1", {false, std::nullopt, false, true});
  auto report = h.ctl.apply_config(stock_with_block());
  CHECK_FALSE(report.ok);
  CHECK(report.with_outcome(DpApplyResult::Outcome::kFailed) == std::vector<std::string>{"sw1"});
  CHECK(report.find("sw1")->error == "barrier timeout");
  CHECK(*h.ctl.active_config() == stock());
  CHECK(h.ctl.dp_state(0x1) == SessionState::kSyncing);
  CHECK(h.fabric.read_flow_table(0x1).same_entries(rules::compile_datapath(stock(), "sw1")));

  h.fabric.set_switch_options("sw1", {});
  h.fabric.disconnect("sw1");
  h.fabric.connect("sw1", h.ctl);
  CHECK(h.ctl.dp_state(0x1) == SessionState::kSteady);
  CHECK(h.ctl.apply_config(stock_with_block()).ok);
  CHECK(h.fabric.read_flow_table(0x1).same_entries(rules::compile_datapath(stock_with_block(), "sw1")));
}

TEST_CASE("apply: concurrent callers are serialized") {
  testing::Harness h(stock(), sim::star_topology(4));
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&h, i] { h.ctl.apply_config(i % 2 ? stock_with_block() : stock()); });
  }
  for (auto& t : threads) t.join();
  const auto active = *h.ctl.active_config();
  CHECK(h.fabric.read_flow_table(0x1, true).same_entries(
      rules::compile_datapath(active, "sw1")));
}

TEST_CASE("L2 learning matches a textbook learning switch") {
  const auto cfg = config::parse_config(kThreePorts);
  sim::TopologySpec topo;
  topo.switches = {{"sw1", 0x1, 3}};
  std::vector<of::MacAddress> mac;
  for (int i = 1; i <= 3; ++i) {
    mac.push_back(of::MacAddress::from_u64(0x0e0000000000ull + static_cast<uint64_t>(i)));
    topo.hosts.push_back({std::string(1, static_cast<char>('A' + i - 1)), "sw1", static_cast<uint32_t>(i),
                          mac.back(), "office"});
  }
  testing::Harness h(cfg, topo);

  // A talks to B before B has ever spoken, then B answers, then C joins.
  struct Step {
    std::string flow;
    size_t src;
    size_t dst;
    int64_t start_ms;
  };
  const std::vector<Step> script = {{"a-b", 0, 1, 0}, {"b-a", 1, 0, 1000}, {"c-a", 2, 0, 2000},
                                    {"a-c", 0, 2, 3000}};
  for (const auto& s : script) {
    sim::FlowSpec f;
    f.name = s.flow;
    f.src = topo.hosts[s.src].name;
    f.dst = topo.hosts[s.dst].name;
    f.pps = 20;
    f.bytes = 100;
    f.start_ms = s.start_ms;
    f.stop_ms = s.start_ms + 500;
    h.fabric.add_flow(f);
  }
  h.fabric.advance(5);

  testing::L2Oracle oracle({{1, "office"}, {2, "office"}, {3, "office"}});
  for (const auto& s : script) {
    sim::FlowLedger expect;
    expect.name = s.flow;
    for (int i = 0; i < 10; ++i) {
      auto r = oracle.forward(static_cast<uint32_t>(s.src + 1), mac[s.src], mac[s.dst]);
      ++expect.sent;
      expect.bytes_sent += 100;
      const bool hit = std::count(r.ports.begin(), r.ports.end(), s.dst + 1) != 0;
      if (hit) {
        ++expect.delivered;
      } else {
        ++expect.dropped;
      }
      expect.flooded += r.ports.size() - (hit ? 1 : 0);
    }
    CHECK(h.fabric.flow_ledger(s.flow) == expect);
  }
  CHECK(h.ctl.mac_table(0x1).size() == 3);
}

TEST_CASE("a host moving ports is relearned and its flows removed") {
  const auto cfg = config::parse_config(kThreePorts);
  auto clock = std::make_shared<ManualClock>();
  controller::Controller ctl(cfg, clock);
  auto peer = steady_peer(ctl, 0x1);
  const auto a = of::MacAddress::from_u64(0x0a);
  const auto b = of::MacAddress::from_u64(0x0b);
  peer->send(10, packet_in(1, a, b));
  peer->send(11, packet_in(2, b, a));
  auto mods = peer->received_of<of::FlowMod>();
  REQUIRE(mods.size() == 1);
  CHECK(mods[0].command == of::FlowModCommand::kAdd);
  CHECK(rules::entry_from_instructions(mods[0].table_id, mods[0].priority, mods[0].match, mods[0].instructions,
                                       mods[0].cookie, mods[0].idle_timeout) == rules::l2_learned_entry(2, a, 1));
  auto outs = peer->received_of<of::PacketOut>();
  REQUIRE(outs.size() == 2);
  CHECK(outs[0].actions == std::vector<of::OutputAction>{{2, 0}, {3, 0}});
  CHECK(outs[1].actions == std::vector<of::OutputAction>{{1, 0}});

  peer->clear();
  peer->send(12, packet_in(3, a, b));
  mods = peer->received_of<of::FlowMod>();
  REQUIRE(mods.size() == 2);
  CHECK(mods[0].command == of::FlowModCommand::kDelete);
  CHECK(mods[0].table_id == 2);
  CHECK(mods[0].match.eth_dst == a);
  CHECK(mods[1].command == of::FlowModCommand::kAdd);
  bool found = false;
  for (const auto& e : ctl.mac_table(0x1)) {
    if (e.mac == a) {
      CHECK(e.port == 3);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("MAC entries age out") {
  const auto cfg = config::parse_config(kThreePorts);
  auto clock = std::make_shared<ManualClock>();
  controller::Controller ctl(cfg, clock);
  auto peer = steady_peer(ctl, 0x1);
  peer->send(10, packet_in(1, of::MacAddress::from_u64(0x0a), of::MacAddress::from_u64(0x0b)));
  CHECK(ctl.mac_table(0x1).size() == 1);
  clock->set(299999);
  ctl.tick();
  CHECK(ctl.mac_table(0x1).size() == 1);
  clock->set(300000);
  ctl.tick();
  CHECK(ctl.mac_table(0x1).empty());
}

TEST_CASE("port stats round trip and timeout") {
  ControllerOptions opt;
  opt.stats_timeout = std::chrono::milliseconds(50);
  testing::Harness h(stock(), sim::star_topology(4), opt);
  auto stats = h.ctl.port_stats(0x1);
  REQUIRE(stats);
  CHECK(stats->size() == 4);
  CHECK_FALSE(h.ctl.port_stats(0x42));
  h.fabric.set_switch_options("sw1", {false, std::nullopt, true, false});
  CHECK_FALSE(h.ctl.port_stats(0x1));
  CHECK(h.ctl.dp_state(0x1) == SessionState::kSteady);
}

TEST_CASE("session survives malformed and unknown messages") {
  auto clock = std::make_shared<ManualClock>();
  controller::Controller ctl(stock(), clock);
  auto peer = steady_peer(ctl, 0x1);
  // Unknown type 0x63 is skipped silently.
  peer->send_raw({0x04, 0x63, 0x00, 0x08, 0x00, 0x00, 0x00, 0x05});
  CHECK(peer->received().empty());
  // A PacketIn whose body is too short earns BAD_REQUEST.
  peer->send_raw({0x04, 0x0a, 0x00, 0x0c, 0x00, 0x00, 0x00, 0x06, 0x00, 0x00, 0x00, 0x00});
  auto errors = peer->received_of<of::Error>();
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].type == of::error::kBadRequest);
  CHECK(ctl.dp_state(0x1) == SessionState::kSteady);
  // A length below the header size breaks framing for good.
  peer->send_raw({0x04, 0x02, 0x00, 0x04, 0x00, 0x00, 0x00, 0x07});
  CHECK(peer->closed());
  CHECK_FALSE(ctl.dp_state(0x1).has_value());
}

TEST_CASE("session fuzz never escapes the session") {
  std::mt19937 rng(7);
  testing::OfGenerator gen(11);
  for (int round = 0; round < 200; ++round) {
    auto clock = std::make_shared<ManualClock>();
    controller::Controller ctl(stock(), clock);
    auto peer = steady_peer(ctl, 0x1);
    for (int i = 0; i < 50 && !peer->closed(); ++i) {
      if (rng() % 3 == 0) {
        std::vector<uint8_t> junk(rng() % 64);
        for (auto& b : junk) b = static_cast<uint8_t>(rng());
        if (junk.size() >= 4 && rng() % 2) {
          junk[0] = 0x04;
          junk[2] = 0;
          junk[3] = static_cast<uint8_t>(std::max<size_t>(junk.size(), 8));
        }
        peer->send_raw(junk);
      } else {
        auto msg = gen.next();
        if (msg.is<of::FeaturesReply>()) continue;
        peer->send_raw(of::encode(msg));
      }
      clock->advance(100);
      ctl.tick();
    }
    const auto state = ctl.sessions().at(0).state;
    CHECK((state == SessionState::kSteady || state == SessionState::kDead));
    if (state == SessionState::kDead) CHECK(peer->closed());
  }
}
