#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdx/common/clock.h"
#include "sdx/openflow/messages.h"
#include "sdx/rules/flow_table.h"
#include "sdx/sim/flow_tables.h"
#include "sdx/sim/topology.h"

namespace sdx::controller {
class Controller;
}

namespace sdx::sim {

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Misbehaviours for exercising the controller.
struct SwitchTestOptions {
  bool of10_hello = false;
  std::optional<uint64_t> fake_dp_id;
  bool stall_stats = false;
  bool drop_barriers = false;
};

struct SimOptions {
  int64_t tick_ms = 100;
  // Real-time bound on the PacketIn round trip over TCP.
  std::chrono::milliseconds sync_timeout{2000};
};

// Per-flow disposition counts. Every generated frame ends up in exactly one
// of delivered, dropped, redirected (or in_flight while the controller has
// it); mirrored and flooded count extra copies.
struct FlowLedger {
  std::string name;
  uint64_t sent = 0;
  uint64_t bytes_sent = 0;
  uint64_t delivered = 0;
  uint64_t dropped = 0;
  uint64_t redirected = 0;
  uint64_t in_flight = 0;
  uint64_t mirrored = 0;
  uint64_t flooded = 0;

  bool conserved() const { return sent == delivered + dropped + redirected + in_flight; }
  bool operator==(const FlowLedger&) const = default;
};

struct TrafficClass {
  uint16_t eth_type = 0;
  std::optional<uint8_t> ip_proto;
  auto operator<=>(const TrafficClass&) const = default;
};

struct HostLedger {
  std::string name;
  uint64_t sent = 0;
  uint64_t received = 0;
  std::map<TrafficClass, uint64_t> received_by_class;
  bool operator==(const HostLedger&) const = default;
};

struct AdvanceSummary {
  int64_t from_ms = 0;
  int64_t to_ms = 0;
  uint64_t frames = 0;
  uint64_t packet_ins = 0;
  uint64_t expired_entries = 0;
};

struct SwitchCounters {
  uint64_t flow_mods = 0;
  uint64_t flow_mod_errors = 0;
  uint64_t barriers = 0;
  uint64_t packet_ins = 0;
  uint64_t packet_outs = 0;
  uint64_t stats_requests = 0;
};

// A deterministic OpenFlow 1.3 fabric: switches holding controller-pushed
// tables, hosts and constant-rate flows, all on a simulated clock. Frames
// are header tuples; only PacketIn/PacketOut carry synthetic bytes.
class SimFabric {
 public:
  SimFabric(TopologySpec spec, std::shared_ptr<ManualClock> clock, SimOptions options = {});
  ~SimFabric();
  SimFabric(const SimFabric&) = delete;
  SimFabric& operator=(const SimFabric&) = delete;

  const TopologySpec& spec() const { return spec_; }
  int64_t now_ms() const { return clock_->now_ms(); }

  void set_switch_options(const std::string& sw, SwitchTestOptions options);

  // In-process links. Delivery is synchronous, so the handshake has run to
  // completion when these return.
  void connect(controller::Controller& ctl);
  void connect(const std::string& sw, controller::Controller& ctl);
  // Outbound TCP to a controller endpoint; throws net::NetError.
  void connect_tcp(const std::string& host, int port);
  void connect_tcp(const std::string& sw, const std::string& host, int port);
  void disconnect(const std::string& sw);
  bool connected(const std::string& sw) const;

  // Every host sends one broadcast ARP so the controller can learn it.
  void announce_hosts();

  void add_flow(FlowSpec flow);
  // Called after every tick, without the fabric lock held.
  void on_tick(std::function<void(int64_t now_ms)> hook);

  AdvanceSummary advance_ms(int64_t duration_ms);
  AdvanceSummary advance(double seconds);

  // Throws SimError("no session") when the switch is not connected and
  // SimError for an unknown dp_id.
  rules::FlowTable read_flow_table(uint64_t dp_id, bool skip_learned = false) const;
  std::vector<of::PortStatsEntry> port_counters(uint64_t dp_id) const;
  SwitchCounters switch_counters(const std::string& sw) const;

  FlowLedger flow_ledger(const std::string& flow) const;
  std::vector<FlowLedger> flow_ledgers() const;
  HostLedger host_ledger(const std::string& host) const;
  std::vector<HostLedger> host_ledgers() const;

 private:
  struct Switch;
  struct Flow;
  struct Pending;
  struct Path;
  class Sink;
  struct Outbox;

  Switch& sw(const std::string& name);
  const Switch& sw(const std::string& name) const;
  const Switch* sw_by_dp(uint64_t dp_id) const;
  void bind_session(Switch& s);
  void on_bytes(size_t index, uint64_t generation, std::span<const uint8_t> bytes);
  void on_close(size_t index, uint64_t generation);
  void handle_message_locked(Switch& s, const of::Message& msg, Outbox& out);
  void handle_packet_out_locked(Switch& s, const of::PacketOut& po);
  Path walk_locked(Switch& s, uint32_t in_port, const FrameHeader& h);
  void account_locked(Switch& s, const Path& path, uint32_t in_port, const FrameHeader& h, uint32_t bytes,
                      uint64_t count, Flow* flow);
  void send_frames(Outbox& out);
  void sync(Switch& s);
  void send_hello(Switch& s);
  void inject(size_t src_host, const FrameHeader& h, uint32_t bytes, uint64_t count, Flow* flow,
              uint64_t& packet_ins);

  TopologySpec spec_;
  std::shared_ptr<ManualClock> clock_;
  SimOptions options_;
  mutable std::mutex mu_;
  std::condition_variable sync_cv_;
  std::vector<std::unique_ptr<Switch>> switches_;
  std::vector<std::unique_ptr<Flow>> flows_;
  std::vector<HostLedger> hosts_;
  std::vector<std::function<void(int64_t)>> hooks_;
};

}  // namespace sdx::sim
