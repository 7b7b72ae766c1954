#include "sdx/controller/controller.h"

#include <spdlog/spdlog.h>

#include <condition_variable>
#include <mutex>

#include "sdx/config/emit.h"
#include "sdx/config/validate.h"
#include "sdx/openflow/codec.h"
#include "sdx/openflow/framing.h"
#include "sdx/rules/compiler.h"
#include "sdx/rules/plan.h"

namespace sdx::controller {

std::string_view state_name(SessionState state) {
  switch (state) {
    case SessionState::kHandshake: return "HANDSHAKE";
    case SessionState::kSyncing: return "SYNCING";
    case SessionState::kSteady: return "STEADY";
    case SessionState::kDead: return "DEAD";
  }
  return "?";
}

std::string_view outcome_name(DpApplyResult::Outcome outcome) {
  switch (outcome) {
    case DpApplyResult::Outcome::kApplied: return "applied";
    case DpApplyResult::Outcome::kDeferred: return "deferred";
    case DpApplyResult::Outcome::kFailed: return "failed";
    case DpApplyResult::Outcome::kRemoved: return "removed";
  }
  return "?";
}

std::vector<std::string> ApplyReport::with_outcome(DpApplyResult::Outcome outcome) const {
  std::vector<std::string> out;
  for (const auto& d : dps) {
    if (d.outcome == outcome) out.push_back(d.dp);
  }
  return out;
}

const DpApplyResult* ApplyReport::find(std::string_view dp) const {
  for (const auto& d : dps) {
    if (d.dp == dp) return &d;
  }
  return nullptr;
}

namespace {

constexpr uint16_t kErrBadRequestBadLen = 6;
constexpr uint16_t kHelloElemVersionBitmap = 1;
constexpr size_t kMaxDeadSessions = 32;
constexpr int64_t kDeadRetentionMs = 60000;

using SteadyTime = std::chrono::steady_clock;

double ms_since(SteadyTime::time_point start) {
  return std::chrono::duration<double, std::milli>(SteadyTime::now() - start).count();
}

struct Waiter {
  uint64_t session_id = 0;
  bool done = false;
  bool failed = false;
  std::string error;
  std::vector<of::PortStatsEntry> stats;
};

struct Session {
  uint64_t id = 0;
  std::shared_ptr<net::Transport> transport;
  of::FrameAssembler frames;
  SessionState state = SessionState::kHandshake;
  bool hello_received = false;
  uint8_t version = 0;
  std::optional<uint64_t> dp_id;
  std::string dp_name;
  int64_t created_ms = 0;
  int64_t last_echo_sent_ms = 0;
  int64_t last_reply_ms = 0;
  std::optional<int64_t> echo_rtt_ms;
  std::optional<rules::FlowTable> pushed;
  std::optional<rules::FlowTable> syncing;
  uint32_t sync_barrier_xid = 0;
  std::string dead_reason;
  int64_t dead_at_ms = 0;

  bool live() const { return state != SessionState::kDead; }
};

struct Outbox {
  std::vector<std::pair<std::shared_ptr<net::Transport>, std::vector<uint8_t>>> sends;
  std::vector<std::shared_ptr<net::Transport>> closes;

  void flush() {
    for (auto& [t, bytes] : sends) t->send(std::move(bytes));
    sends.clear();
    for (auto& t : closes) t->close();
    closes.clear();
  }
};

std::vector<uint8_t> encode_i64(int64_t v) {
  std::vector<uint8_t> out(8);
  for (int i = 7; i >= 0; --i) {
    out[static_cast<size_t>(i)] = static_cast<uint8_t>(v);
    v >>= 8;
  }
  return out;
}

std::optional<int64_t> decode_i64(const std::vector<uint8_t>& b) {
  if (b.size() != 8) return std::nullopt;
  int64_t v = 0;
  for (uint8_t x : b) v = v << 8 | x;
  return v;
}

// True unless the Hello carries a version bitmap without 1.3 in it.
bool hello_offers_13(const of::Hello& hello) {
  const auto& e = hello.elements;
  size_t pos = 0;
  while (pos + 4 <= e.size()) {
    const uint16_t type = static_cast<uint16_t>(e[pos] << 8 | e[pos + 1]);
    const uint16_t len = static_cast<uint16_t>(e[pos + 2] << 8 | e[pos + 3]);
    if (len < 4 || pos + len > e.size()) return true;
    if (type == kHelloElemVersionBitmap && len >= 8) {
      const uint32_t bitmap = static_cast<uint32_t>(e[pos + 4]) << 24 |
                              static_cast<uint32_t>(e[pos + 5]) << 16 |
                              static_cast<uint32_t>(e[pos + 6]) << 8 | e[pos + 7];
      return (bitmap & (1u << of::kVersion)) != 0;
    }
    pos += (len + 7u) / 8u * 8u;
  }
  return true;
}

bool vlan_layout_changed(const config::DatapathConfig* a, const config::DatapathConfig* b) {
  if (a == nullptr || b == nullptr) return true;
  if (a->interfaces.size() != b->interfaces.size()) return true;
  for (const auto& [port, iface] : a->interfaces) {
    auto it = b->interfaces.find(port);
    if (it == b->interfaces.end() || it->second.native_vlan != iface.native_vlan) return true;
  }
  return false;
}

}  // namespace

struct Controller::Core : std::enable_shared_from_this<Core> {
  mutable std::mutex mu;
  mutable std::condition_variable cv;
  std::shared_ptr<Clock> clock;
  ControllerOptions opt;
  std::shared_ptr<const config::FabricConfig> cfg;
  std::map<uint64_t, Session> sessions;
  std::map<uint64_t, uint64_t> by_dp;
  std::map<uint32_t, std::shared_ptr<Waiter>> waiters;
  std::map<uint64_t, std::map<std::string, std::map<of::MacAddress, MacEntry>>> macs;
  uint64_t next_session = 1;
  uint32_t next_xid = 1;
  ControllerCounters counters;
  std::vector<uint64_t> rejected;
  int64_t heartbeat_ms = -1;

  std::mutex apply_mu;
  std::condition_variable apply_cv;
  uint64_t next_ticket = 0;
  uint64_t serving = 0;

  class Sink : public net::ByteSink {
   public:
    Sink(std::weak_ptr<Core> core, uint64_t id) : core_(std::move(core)), id_(id) {}
    void on_bytes(std::span<const uint8_t> bytes) override {
      if (auto c = core_.lock()) c->on_bytes(id_, bytes);
    }
    void on_close() override {
      if (auto c = core_.lock()) c->on_close(id_);
    }

   private:
    std::weak_ptr<Core> core_;
    uint64_t id_;
  };

  // ---- helpers; all *_locked functions require mu ----

  uint32_t send_locked(Session& s, of::Body body, Outbox& out, uint32_t xid = 0) {
    if (xid == 0) {
      xid = next_xid++;
      if (next_xid == 0) next_xid = 1;
    }
    if (std::holds_alternative<of::FlowMod>(body)) ++counters.flow_mods_sent;
    if (std::holds_alternative<of::PacketOut>(body)) ++counters.packet_outs;
    out.sends.emplace_back(s.transport, of::encode(of::Message{xid, std::move(body)}));
    return xid;
  }

  uint32_t send_plan_locked(Session& s, const rules::FlowUpdatePlan& plan, Outbox& out) {
    uint32_t barrier = 0;
    for (const auto& step : plan.steps) {
      if (const auto* fm = std::get_if<of::FlowMod>(&step)) {
        send_locked(s, *fm, out);
      } else {
        barrier = send_locked(s, of::BarrierRequest{}, out);
      }
    }
    return barrier;
  }

  std::shared_ptr<Waiter> add_waiter_locked(uint32_t xid, uint64_t session_id) {
    auto w = std::make_shared<Waiter>();
    w->session_id = session_id;
    waiters[xid] = w;
    return w;
  }

  void kill_locked(Session& s, const std::string& reason, Outbox& out) {
    if (!s.live()) return;
    s.state = SessionState::kDead;
    s.dead_reason = reason;
    s.dead_at_ms = clock->now_ms();
    if (s.dp_id) {
      auto it = by_dp.find(*s.dp_id);
      if (it != by_dp.end() && it->second == s.id) by_dp.erase(it);
      spdlog::warn("session {} ({}) dead: {}", s.id, s.dp_name, reason);
    } else {
      spdlog::warn("session {} ({}) dead: {}", s.id, s.transport->describe(), reason);
    }
    for (auto& [xid, w] : waiters) {
      if (w->session_id == s.id && !w->done) {
        w->done = true;
        w->failed = true;
        w->error = "session closed: " + reason;
      }
    }
    out.closes.push_back(s.transport);
    cv.notify_all();
  }

  void begin_sync_locked(Session& s, rules::FlowTable table, Outbox& out) {
    s.state = SessionState::kSyncing;
    s.sync_barrier_xid = send_plan_locked(s, rules::plan_install(table), out);
    s.syncing = std::move(table);
  }

  void reconcile_locked(Session& s, Outbox& out) {
    if (s.state != SessionState::kSteady || !s.pushed) return;
    const auto* dp = cfg->find_dp_by_id(*s.dp_id);
    if (dp == nullptr) {
      send_locked(s, rules::wipe_flow_mod(), out);
      kill_locked(s, "datapath removed from config", out);
      return;
    }
    auto target = rules::compile_datapath(*cfg, dp->name);
    s.dp_name = dp->name;
    if (target.entries != s.pushed->entries) {
      send_plan_locked(s, rules::plan_update(*s.pushed, target), out);
    }
    s.pushed = std::move(target);
  }

  void on_bytes(uint64_t id, std::span<const uint8_t> bytes) {
    Outbox out;
    {
      std::lock_guard lock(mu);
      auto it = sessions.find(id);
      if (it == sessions.end() || !it->second.live()) return;
      Session& s = it->second;
      std::vector<std::vector<uint8_t>> frames;
      try {
        frames = s.frames.feed(bytes);
      } catch (const of::FramingError& e) {
        kill_locked(s, std::string("framing error: ") + e.what(), out);
      }
      for (const auto& frame : frames) {
        if (!s.live()) break;
        handle_frame_locked(s, frame, out);
      }
      cv.notify_all();
    }
    out.flush();
  }

  void on_close(uint64_t id) {
    Outbox out;
    {
      std::lock_guard lock(mu);
      auto it = sessions.find(id);
      if (it == sessions.end()) return;
      kill_locked(it->second, "connection closed", out);
    }
    out.closes.clear();
  }

  void handle_frame_locked(Session& s, const std::vector<uint8_t>& frame, Outbox& out) {
    auto result = of::decode(frame);
    if (!result.ok()) {
      const auto& err = result.error();
      ++counters.decode_errors;
      switch (err.kind) {
        case of::DecodeError::Kind::kBadVersion:
          if (s.state == SessionState::kHandshake &&
              err.msg_type == static_cast<uint8_t>(of::MsgType::kHello)) {
            std::string text = "peer speaks OpenFlow version " + std::to_string(err.version);
            send_locked(s, of::Error{of::error::kHelloFailed, of::error::kHelloIncompatible, {text.begin(), text.end()}},
                        out, err.xid);
            kill_locked(s, "hello failed: " + err.message, out);
          } else {
            kill_locked(s, err.message, out);
          }
          return;
        case of::DecodeError::Kind::kUnknownType:
          spdlog::info("session {}: skipping {}", s.id, err.message);
          return;
        default:
          spdlog::warn("session {}: undecodable frame: {}", s.id, err.message);
          send_locked(s, of::Error{of::error::kBadRequest, kErrBadRequestBadLen,
                                   std::vector<uint8_t>(frame.begin(), frame.begin() + std::min<size_t>(frame.size(), 64))},
                      out, err.xid);
          return;
      }
    }
    const of::Message& msg = result.message();
    const int64_t now = clock->now_ms();
    if (msg.is<of::Hello>()) {
      if (s.state != SessionState::kHandshake || s.hello_received) return;
      if (!hello_offers_13(msg.as<of::Hello>())) {
        send_locked(s, of::Error{of::error::kHelloFailed, of::error::kHelloIncompatible, {}}, out, msg.xid);
        kill_locked(s, "hello failed: no OpenFlow 1.3 in version bitmap", out);
        return;
      }
      s.hello_received = true;
      s.version = of::kVersion;
      send_locked(s, of::FeaturesRequest{}, out);
    } else if (msg.is<of::EchoRequest>()) {
      send_locked(s, of::EchoReply{msg.as<of::EchoRequest>().payload}, out, msg.xid);
    } else if (msg.is<of::EchoReply>()) {
      s.last_reply_ms = now;
      if (auto sent = decode_i64(msg.as<of::EchoReply>().payload)) s.echo_rtt_ms = now - *sent;
    } else if (msg.is<of::FeaturesReply>()) {
      if (s.state != SessionState::kHandshake) return;
      handle_features_locked(s, msg.as<of::FeaturesReply>(), out);
    } else if (msg.is<of::BarrierReply>()) {
      if (s.state == SessionState::kSyncing && msg.xid == s.sync_barrier_xid) {
        s.state = SessionState::kSteady;
        s.pushed = std::move(s.syncing);
        s.syncing.reset();
        spdlog::info("datapath {} ({}) steady", s.dp_name, config::format_hex(*s.dp_id));
        reconcile_locked(s, out);
      }
      complete_waiter_locked(msg.xid, s.id);
    } else if (msg.is<of::MultipartReply>()) {
      auto it = waiters.find(msg.xid);
      if (it == waiters.end() || it->second->session_id != s.id) return;
      const auto& reply = msg.as<of::MultipartReply>();
      if (const auto* entries = std::get_if<std::vector<of::PortStatsEntry>>(&reply.body)) {
        auto& acc = it->second->stats;
        acc.insert(acc.end(), entries->begin(), entries->end());
      }
      if ((reply.flags & of::kMultipartReplyMore) == 0) complete_waiter_locked(msg.xid, s.id);
    } else if (msg.is<of::PacketIn>()) {
      ++counters.packet_ins;
      if (s.state == SessionState::kSteady) handle_packet_in_locked(s, msg.as<of::PacketIn>(), out);
    } else if (msg.is<of::Error>()) {
      const auto& e = msg.as<of::Error>();
      spdlog::warn("datapath {} error type={} code={} xid={}", s.dp_name, e.type, e.code, msg.xid);
      auto it = waiters.find(msg.xid);
      if (it != waiters.end() && it->second->session_id == s.id) {
        it->second->done = true;
        it->second->failed = true;
        it->second->error = "switch error type " + std::to_string(e.type);
      }
    } else if (msg.is<of::PortStatus>()) {
      spdlog::info("datapath {} port {} status reason {}", s.dp_name, msg.as<of::PortStatus>().desc.port_no,
                   msg.as<of::PortStatus>().reason);
    }
  }

  void complete_waiter_locked(uint32_t xid, uint64_t session_id) {
    auto it = waiters.find(xid);
    if (it == waiters.end() || it->second->session_id != session_id) return;
    it->second->done = true;
    cv.notify_all();
  }

  void handle_features_locked(Session& s, const of::FeaturesReply& f, Outbox& out) {
    const auto* dp = cfg->find_dp_by_id(f.datapath_id);
    if (dp == nullptr) {
      ++counters.rejected_sessions;
      rejected.push_back(f.datapath_id);
      if (rejected.size() > 64) rejected.erase(rejected.begin());
      kill_locked(s, "unknown dp_id " + config::format_hex(f.datapath_id), out);
      return;
    }
    if (auto old = by_dp.find(f.datapath_id); old != by_dp.end()) {
      kill_locked(sessions.at(old->second), "replaced by a new connection", out);
    }
    s.dp_id = f.datapath_id;
    s.dp_name = dp->name;
    by_dp[f.datapath_id] = s.id;
    const int64_t now = clock->now_ms();
    s.last_reply_ms = now;
    s.last_echo_sent_ms = now;
    spdlog::info("datapath {} ({}) connected from {}", dp->name, config::format_hex(f.datapath_id),
                 s.transport->describe());
    begin_sync_locked(s, rules::compile_datapath(*cfg, dp->name), out);
  }

  void handle_packet_in_locked(Session& s, const of::PacketIn& pi, Outbox& out) {
    if (pi.frame.size() < 14 || !pi.match.in_port) {
      ++counters.malformed_frames;
      return;
    }
    const uint32_t in_port = *pi.match.in_port;
    const auto* dp = cfg->find_dp_by_id(*s.dp_id);
    if (dp == nullptr) return;
    auto iface = dp->interfaces.find(in_port);
    if (iface == dp->interfaces.end()) {
      ++counters.malformed_frames;
      return;
    }
    of::MacAddress dst, src;
    std::copy(pi.frame.begin(), pi.frame.begin() + 6, dst.bytes.begin());
    std::copy(pi.frame.begin() + 6, pi.frame.begin() + 12, src.bytes.begin());
    const std::string& vlan = iface->second.native_vlan;
    auto& table = macs[*s.dp_id][vlan];
    const int64_t now = clock->now_ms();

    if (!src.is_multicast()) {
      auto known = table.find(src);
      if (known != table.end() && known->second.port != in_port) {
        of::FlowMod del;
        del.command = of::FlowModCommand::kDelete;
        del.table_id = static_cast<uint8_t>(rules::Table::kL2);
        del.cookie = rules::kCookieMarker << 56;
        del.cookie_mask = rules::kCookieMarkerMask;
        del.match.eth_dst = src;
        send_locked(s, del, out);
      }
      table[src] = MacEntry{vlan, src, in_port, now};
    }

    of::PacketOut po;
    po.buffer_id = of::kNoBuffer;
    po.in_port = in_port;
    po.frame = pi.frame;
    auto target = dst.is_multicast() ? table.end() : table.find(dst);
    if (target == table.end()) {
      for (uint32_t port : rules::vlan_flood_ports(*dp, in_port)) po.actions.push_back({port, 0});
      if (po.actions.empty()) return;
      send_locked(s, po, out);
      return;
    }
    const uint32_t out_port = target->second.port;
    if (out_port == in_port) return;
    send_locked(s, rules::to_flow_mod(rules::l2_learned_entry(in_port, dst, out_port), of::FlowModCommand::kAdd),
                out);
    po.actions.push_back({out_port, 0});
    send_locked(s, po, out);
  }

  void tick() {
    Outbox out;
    {
      std::lock_guard lock(mu);
      const int64_t now = clock->now_ms();
      heartbeat_ms = now;
      for (auto& [id, s] : sessions) {
        switch (s.state) {
          case SessionState::kHandshake:
            if (now - s.created_ms >= opt.handshake_timeout_ms) kill_locked(s, "handshake timeout", out);
            break;
          case SessionState::kSyncing:
          case SessionState::kSteady:
            if (now - s.last_reply_ms >= opt.echo_interval_ms * opt.echo_miss_limit) {
              kill_locked(s, "echo timeout", out);
            } else if (now - s.last_echo_sent_ms >= opt.echo_interval_ms) {
              send_locked(s, of::EchoRequest{encode_i64(now)}, out);
              s.last_echo_sent_ms = now;
            }
            break;
          case SessionState::kDead: break;
        }
      }
      size_t dead = 0;
      for (auto it = sessions.rbegin(); it != sessions.rend(); ++it) {
        if (!it->second.live()) ++dead;
      }
      std::erase_if(sessions, [&](const auto& kv) {
        const Session& s = kv.second;
        if (s.live()) return false;
        if (now - s.dead_at_ms > kDeadRetentionMs || dead > kMaxDeadSessions) {
          --dead;
          return true;
        }
        return false;
      });
      std::erase_if(waiters, [](const auto& kv) { return kv.second->done && kv.second.use_count() == 1; });
      for (auto& [dp, vlans] : macs) {
        for (auto& [vlan, table] : vlans) {
          std::erase_if(table, [&](const auto& kv) {
            return now - kv.second.last_seen_ms >= opt.l2_idle_timeout_ms;
          });
        }
      }
    }
    out.flush();
  }
};


Controller::Controller(config::FabricConfig cfg, std::shared_ptr<Clock> clock, ControllerOptions options)
    : core_(std::make_shared<Core>()), clock_(std::move(clock)) {
  config::require_valid(cfg);
  core_->clock = clock_;
  core_->opt = options;
  core_->cfg = std::make_shared<const config::FabricConfig>(std::move(cfg));
}

Controller::~Controller() {
  Outbox out;
  {
    std::lock_guard lock(core_->mu);
    for (auto& [id, s] : core_->sessions) core_->kill_locked(s, "controller shutdown", out);
  }
  out.sends.clear();
  out.flush();
}

void Controller::attach(std::shared_ptr<net::Transport> transport, const BindFn& bind) {
  uint64_t id;
  {
    std::lock_guard lock(core_->mu);
    id = core_->next_session++;
    Session& s = core_->sessions[id];
    s.id = id;
    s.transport = transport;
    s.created_ms = clock_->now_ms();
  }
  bind(std::make_shared<Core::Sink>(core_, id));
  Outbox out;
  {
    std::lock_guard lock(core_->mu);
    auto it = core_->sessions.find(id);
    if (it == core_->sessions.end() || !it->second.live()) return;
    core_->send_locked(it->second, of::Hello{}, out);
  }
  out.flush();
}

void Controller::tick() { core_->tick(); }

std::shared_ptr<const config::FabricConfig> Controller::active_config() const {
  std::lock_guard lock(core_->mu);
  return core_->cfg;
}

ApplyReport Controller::apply_config(const config::FabricConfig& new_cfg) {
  config::require_valid(new_cfg);
  Core& c = *core_;
  uint64_t ticket;
  {
    std::unique_lock lock(c.apply_mu);
    ticket = c.next_ticket++;
    c.apply_cv.wait(lock, [&] { return c.serving == ticket; });
  }
  struct Release {
    Core& c;
    ~Release() {
      std::lock_guard lock(c.apply_mu);
      ++c.serving;
      c.apply_cv.notify_all();
    }
  } release{c};

  const auto start = SteadyTime::now();
  ApplyReport report;
  auto next = std::make_shared<const config::FabricConfig>(new_cfg);
  report.fingerprint = config::config_fingerprint(*next);

  struct Pending {
    uint64_t session_id;
    size_t report_index;
    rules::FlowTable old_table;
    rules::FlowTable target;
    std::shared_ptr<Waiter> waiter;
  };
  std::vector<Pending> pending;
  std::shared_ptr<const config::FabricConfig> old_cfg;
  Outbox out;
  {
    std::lock_guard lock(c.mu);
    old_cfg = c.cfg;
    for (const auto& [name, dp] : next->dps) {
      DpApplyResult r;
      r.dp = name;
      r.dp_id = dp.dp_id;
      auto sid = c.by_dp.find(dp.dp_id);
      Session* s = sid == c.by_dp.end() ? nullptr : &c.sessions.at(sid->second);
      if (s == nullptr || s->state != SessionState::kSteady || !s->pushed) {
        r.outcome = DpApplyResult::Outcome::kDeferred;
        report.dps.push_back(std::move(r));
        continue;
      }
      auto target = rules::compile_datapath(*next, name);
      auto plan = rules::plan_update(*s->pushed, target);
      r.added = plan.count(of::FlowModCommand::kAdd);
      r.removed = plan.count(of::FlowModCommand::kDeleteStrict);
      report.dps.push_back(r);
      if (plan.empty()) continue;
      const uint32_t barrier = c.send_plan_locked(*s, plan, out);
      pending.push_back({s->id, report.dps.size() - 1, *s->pushed, std::move(target),
                         c.add_waiter_locked(barrier, s->id)});
    }
    for (const auto& [dp_id, sid] : c.by_dp) {
      if (next->find_dp_by_id(dp_id) != nullptr) continue;
      DpApplyResult r;
      r.dp = c.sessions.at(sid).dp_name;
      r.dp_id = dp_id;
      r.outcome = DpApplyResult::Outcome::kRemoved;
      report.dps.push_back(std::move(r));
    }
  }
  out.flush();

  bool all_ok = true;
  {
    std::unique_lock lock(c.mu);
    for (auto& p : pending) {
      const bool arrived = c.cv.wait_for(lock, c.opt.barrier_timeout, [&] { return p.waiter->done; });
      auto& r = report.dps[p.report_index];
      r.duration_ms = ms_since(start);
      if (!arrived || p.waiter->failed) {
        all_ok = false;
        r.outcome = DpApplyResult::Outcome::kFailed;
        r.error = arrived ? p.waiter->error : "barrier timeout";
      }
    }
    for (auto& [xid, w] : c.waiters) {
      for (auto& p : pending) {
        if (w == p.waiter) w->done = true;
      }
    }
  }

  {
    std::lock_guard lock(c.mu);
    if (all_ok) {
      c.cfg = next;
      for (auto& p : pending) {
        auto it = c.sessions.find(p.session_id);
        if (it != c.sessions.end() && it->second.live()) it->second.pushed = p.target;
      }
      for (auto& [id, s] : c.sessions) {
        if (!s.live() || !s.dp_id) continue;
        const bool touched = std::any_of(pending.begin(), pending.end(),
                                         [&](const Pending& p) { return p.session_id == id; });
        const auto* before = old_cfg->find_dp_by_id(*s.dp_id);
        const auto* after = next->find_dp_by_id(*s.dp_id);
        if (after != nullptr && vlan_layout_changed(before, after)) {
          c.macs.erase(*s.dp_id);
          of::FlowMod flush;
          flush.command = of::FlowModCommand::kDelete;
          flush.table_id = static_cast<uint8_t>(rules::Table::kL2);
          flush.cookie = rules::encode_cookie(rules::CookieKind::kL2Learned, "", 0);
          flush.cookie_mask = 0xFFFFull << 48;
          if (s.state == SessionState::kSteady) c.send_locked(s, flush, out);
        }
        if (!touched) c.reconcile_locked(s, out);
      }
    } else {
      for (auto& p : pending) {
        auto it = c.sessions.find(p.session_id);
        if (it == c.sessions.end() || !it->second.live()) continue;
        Session& s = it->second;
        if (report.dps[p.report_index].outcome == DpApplyResult::Outcome::kFailed) {
          spdlog::warn("apply failed on {}; resyncing previous table", s.dp_name);
          c.begin_sync_locked(s, p.old_table, out);
        } else {
          c.send_plan_locked(s, rules::plan_update(p.target, p.old_table), out);
          s.pushed = p.old_table;
        }
      }
    }
  }
  out.flush();
  report.ok = all_ok;
  report.duration_ms = ms_since(start);
  spdlog::info("apply {}: {} dps, {:.1f} ms", all_ok ? "succeeded" : "failed", report.dps.size(),
               report.duration_ms);
  return report;
}

std::optional<std::vector<of::PortStatsEntry>> Controller::port_stats(uint64_t dp_id) {
  Core& c = *core_;
  Outbox out;
  std::shared_ptr<Waiter> waiter;
  uint32_t xid = 0;
  {
    std::lock_guard lock(c.mu);
    auto sid = c.by_dp.find(dp_id);
    if (sid == c.by_dp.end()) return std::nullopt;
    Session& s = c.sessions.at(sid->second);
    if (s.state != SessionState::kSteady) return std::nullopt;
    xid = c.next_xid++;
    waiter = c.add_waiter_locked(xid, s.id);
    c.send_locked(s, of::MultipartRequest{0, of::PortStatsRequest{of::port::kAny}}, out, xid);
  }
  out.flush();
  std::unique_lock lock(c.mu);
  const bool arrived = c.cv.wait_for(lock, c.opt.stats_timeout, [&] { return waiter->done; });
  c.waiters.erase(xid);
  if (!arrived || waiter->failed) return std::nullopt;
  return std::move(waiter->stats);
}

std::vector<SessionSummary> Controller::sessions() const {
  std::lock_guard lock(core_->mu);
  std::vector<SessionSummary> out;
  for (const auto& [id, s] : core_->sessions) {
    SessionSummary sum;
    sum.id = id;
    sum.peer = s.transport->describe();
    sum.dp_id = s.dp_id;
    sum.dp_name = s.dp_name;
    sum.state = s.state;
    sum.version = s.version;
    sum.echo_rtt_ms = s.echo_rtt_ms;
    sum.pushed_fingerprint = s.pushed ? s.pushed->fingerprint : 0;
    sum.dead_reason = s.dead_reason;
    out.push_back(std::move(sum));
  }
  return out;
}

std::optional<SessionState> Controller::dp_state(uint64_t dp_id) const {
  std::lock_guard lock(core_->mu);
  auto it = core_->by_dp.find(dp_id);
  if (it == core_->by_dp.end()) return std::nullopt;
  return core_->sessions.at(it->second).state;
}

std::vector<uint64_t> Controller::steady_dps() const {
  std::lock_guard lock(core_->mu);
  std::vector<uint64_t> out;
  for (const auto& [dp_id, sid] : core_->by_dp) {
    if (core_->sessions.at(sid).state == SessionState::kSteady) out.push_back(dp_id);
  }
  return out;
}

std::optional<rules::FlowTable> Controller::pushed_table(uint64_t dp_id) const {
  std::lock_guard lock(core_->mu);
  auto it = core_->by_dp.find(dp_id);
  if (it == core_->by_dp.end()) return std::nullopt;
  return core_->sessions.at(it->second).pushed;
}

std::vector<MacEntry> Controller::mac_table(uint64_t dp_id) const {
  std::lock_guard lock(core_->mu);
  std::vector<MacEntry> out;
  auto it = core_->macs.find(dp_id);
  if (it == core_->macs.end()) return out;
  for (const auto& [vlan, table] : it->second) {
    for (const auto& [mac, e] : table) out.push_back(e);
  }
  return out;
}

ControllerCounters Controller::counters() const {
  std::lock_guard lock(core_->mu);
  return core_->counters;
}

std::vector<uint64_t> Controller::rejected_dp_ids() const {
  std::lock_guard lock(core_->mu);
  return core_->rejected;
}

int64_t Controller::last_heartbeat_ms() const {
  std::lock_guard lock(core_->mu);
  return core_->heartbeat_ms;
}

bool Controller::wait_for_state(uint64_t dp_id, SessionState state, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(core_->mu);
  return core_->cv.wait_for(lock, timeout, [&] {
    auto it = core_->by_dp.find(dp_id);
    return it != core_->by_dp.end() && core_->sessions.at(it->second).state == state;
  });
}

}  // namespace sdx::controller
