#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdx/common/clock.h"
#include "sdx/config/model.h"
#include "sdx/net/transport.h"
#include "sdx/openflow/messages.h"
#include "sdx/rules/flow_table.h"

namespace sdx::controller {

enum class SessionState { kHandshake, kSyncing, kSteady, kDead };
std::string_view state_name(SessionState state);

struct SessionSummary {
  uint64_t id = 0;
  std::string peer;
  std::optional<uint64_t> dp_id;
  std::string dp_name;
  SessionState state = SessionState::kHandshake;
  uint8_t version = 0;
  std::optional<int64_t> echo_rtt_ms;
  uint64_t pushed_fingerprint = 0;
  std::string dead_reason;
};

struct DpApplyResult {
  enum class Outcome { kApplied, kDeferred, kFailed, kRemoved };
  std::string dp;
  uint64_t dp_id = 0;
  Outcome outcome = Outcome::kApplied;
  size_t added = 0;
  size_t removed = 0;
  double duration_ms = 0;
  std::string error;
};

std::string_view outcome_name(DpApplyResult::Outcome outcome);

struct ApplyReport {
  bool ok = true;
  std::vector<DpApplyResult> dps;
  uint64_t fingerprint = 0;
  double duration_ms = 0;

  std::vector<std::string> with_outcome(DpApplyResult::Outcome outcome) const;
  const DpApplyResult* find(std::string_view dp) const;
};

struct ControllerOptions {
  int64_t echo_interval_ms = 5000;
  int echo_miss_limit = 3;
  int64_t handshake_timeout_ms = 10000;
  int64_t l2_idle_timeout_ms = 300000;
  std::chrono::milliseconds barrier_timeout{5000};
  std::chrono::milliseconds stats_timeout{2000};
};

struct ControllerCounters {
  uint64_t flow_mods_sent = 0;
  uint64_t packet_ins = 0;
  uint64_t packet_outs = 0;
  uint64_t malformed_frames = 0;
  uint64_t decode_errors = 0;
  uint64_t rejected_sessions = 0;
};

struct MacEntry {
  std::string vlan;
  of::MacAddress mac;
  uint32_t port = 0;
  int64_t last_seen_ms = 0;
};

// The control plane. Sessions are sans-IO: bytes come in through the sink
// returned by attach() and go out through the session's transport. No lock
// is held while sending, so an in-process loopback peer may answer
// synchronously from inside send().
class Controller {
 public:
  Controller(config::FabricConfig cfg, std::shared_ptr<Clock> clock, ControllerOptions options = {});
  ~Controller();
  Controller(const Controller&) = delete;
  Controller& operator=(const Controller&) = delete;

  using BindFn = std::function<void(std::shared_ptr<net::ByteSink>)>;

  // Registers a new switch connection. bind receives the sink for inbound
  // bytes and must wire it up before returning; Hello is sent afterwards.
  void attach(std::shared_ptr<net::Transport> transport, const BindFn& bind);

  // Timers: echo, echo liveness, handshake timeout, MAC ageing. Also records
  // the controller heartbeat.
  void tick();

  // Pushes new_cfg to every connected datapath and makes it active once all
  // barriers confirm. Throws config::ConfigError when new_cfg is invalid.
  // Serialized FIFO against concurrent callers.
  ApplyReport apply_config(const config::FabricConfig& new_cfg);

  std::shared_ptr<const config::FabricConfig> active_config() const;

  // PORT_STATS for all ports of a STEADY datapath; nullopt on timeout or
  // when no such session exists.
  std::optional<std::vector<of::PortStatsEntry>> port_stats(uint64_t dp_id);

  std::vector<SessionSummary> sessions() const;
  std::optional<SessionState> dp_state(uint64_t dp_id) const;
  std::vector<uint64_t> steady_dps() const;
  std::optional<rules::FlowTable> pushed_table(uint64_t dp_id) const;
  std::vector<MacEntry> mac_table(uint64_t dp_id) const;
  ControllerCounters counters() const;
  std::vector<uint64_t> rejected_dp_ids() const;
  int64_t last_heartbeat_ms() const;
  const Clock& clock() const { return *clock_; }

  // Blocks until dp reaches state or the real-time timeout elapses.
  bool wait_for_state(uint64_t dp_id, SessionState state, std::chrono::milliseconds timeout) const;

 private:
  struct Core;
  std::shared_ptr<Core> core_;
  std::shared_ptr<Clock> clock_;
};

}  // namespace sdx::controller
