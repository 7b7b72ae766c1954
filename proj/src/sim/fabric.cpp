#include "sdx/sim/fabric.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstring>

#include "sdx/controller/controller.h"
#include "sdx/net/tcp.h"
#include "sdx/net/transport.h"
#include "sdx/openflow/codec.h"
#include "sdx/openflow/framing.h"

namespace sdx::sim {

namespace {

constexpr uint16_t kEthArp = 0x0806;
constexpr uint16_t kEthIpv4 = 0x0800;
constexpr uint16_t kEthIpv6 = 0x86dd;
constexpr uint32_t kAnnounceBytes = 64;
constexpr char kTagMagic[4] = {'S', 'D', 'X', 'S'};
constexpr size_t kTagSize = 12;
constexpr uint32_t kCapFlowStats = 1u << 0;
constexpr uint32_t kCapPortStats = 1u << 2;
const std::vector<uint8_t> kOf10Hello = {0x01, 0x00, 0x00, 0x08, 0x00, 0x00, 0x00, 0x01};

enum class Role { kMirror, kRedirect, kForward };

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

// Ethernet header, a protocol stub carrying ip_proto where applicable, and a
// trailing tag that lets a PacketOut be matched to the frame it releases.
std::vector<uint8_t> synth_frame(const FrameHeader& h, uint32_t bytes, uint64_t tag) {
  std::vector<uint8_t> out;
  out.insert(out.end(), h.dst.bytes.begin(), h.dst.bytes.end());
  out.insert(out.end(), h.src.bytes.begin(), h.src.bytes.end());
  put_u16(out, h.eth_type);
  const uint16_t ip_len = static_cast<uint16_t>(std::min<uint32_t>(bytes - 14, 0xffff));
  if (h.eth_type == kEthIpv4) {
    std::vector<uint8_t> ip(20, 0);
    ip[0] = 0x45;
    ip[2] = static_cast<uint8_t>(ip_len >> 8);
    ip[3] = static_cast<uint8_t>(ip_len);
    ip[8] = 64;
    ip[9] = h.ip_proto.value_or(0);
    out.insert(out.end(), ip.begin(), ip.end());
  } else if (h.eth_type == kEthIpv6) {
    std::vector<uint8_t> ip(40, 0);
    ip[0] = 0x60;
    const uint16_t payload = static_cast<uint16_t>(ip_len > 40 ? ip_len - 40 : 0);
    ip[4] = static_cast<uint8_t>(payload >> 8);
    ip[5] = static_cast<uint8_t>(payload);
    ip[6] = h.ip_proto.value_or(59);
    ip[7] = 64;
    out.insert(out.end(), ip.begin(), ip.end());
  } else if (h.eth_type == kEthArp) {
    std::vector<uint8_t> arp(28, 0);
    arp[1] = 1;
    arp[2] = 0x08;
    arp[4] = 6;
    arp[5] = 4;
    arp[7] = 1;
    std::copy(h.src.bytes.begin(), h.src.bytes.end(), arp.begin() + 8);
    out.insert(out.end(), arp.begin(), arp.end());
  }
  out.insert(out.end(), std::begin(kTagMagic), std::end(kTagMagic));
  for (int i = 7; i >= 0; --i) out.push_back(static_cast<uint8_t>(tag >> (8 * i)));
  return out;
}

std::optional<uint64_t> frame_tag(const std::vector<uint8_t>& frame) {
  if (frame.size() < kTagSize) return std::nullopt;
  const size_t at = frame.size() - kTagSize;
  if (std::memcmp(frame.data() + at, kTagMagic, 4) != 0) return std::nullopt;
  uint64_t tag = 0;
  for (size_t i = at + 4; i < frame.size(); ++i) tag = tag << 8 | frame[i];
  return tag;
}

uint64_t frames_by(const FlowSpec& f, int64_t t_ms) {
  if (t_ms <= f.start_ms) return 0;
  const int64_t end = f.stop_ms ? std::min(t_ms, *f.stop_ms) : t_ms;
  if (end <= f.start_ms) return 0;
  const unsigned __int128 us = static_cast<unsigned __int128>(end - f.start_ms) * 1000u;
  return static_cast<uint64_t>(us * f.pps / 1000000u);
}

}  // namespace

struct SimFabric::Outbox {
  std::vector<std::pair<std::shared_ptr<net::Transport>, std::vector<uint8_t>>> sends;

  void push(const std::shared_ptr<net::Transport>& t, std::vector<uint8_t> bytes) {
    if (t) sends.emplace_back(t, std::move(bytes));
  }
  void push(const std::shared_ptr<net::Transport>& t, uint32_t xid, of::Body body) {
    push(t, of::encode(of::Message{xid, std::move(body)}));
  }
};

struct SimFabric::Path {
  std::vector<std::pair<uint32_t, Role>> copies;
  std::vector<uint64_t> hits;
  bool to_controller = false;
  bool miss = false;
  uint8_t controller_table = 0;
  uint64_t controller_cookie = 0;
  uint8_t controller_reason = of::packet_in_reason::kAction;
};

struct SimFabric::Pending {
  uint64_t tag = 0;
  Flow* flow = nullptr;
  FrameHeader header;
  uint32_t bytes = 0;
  uint32_t in_port = 0;
  Path path;
};

struct SimFabric::Flow {
  FlowSpec spec;
  size_t src_host = 0;
  size_t dst_host = 0;
  FrameHeader header;
  FlowLedger ledger;
};

struct SimFabric::Switch {
  size_t index = 0;
  SwitchSpec spec;
  SwitchTestOptions test;
  SimFlowTables tables;
  std::map<uint32_t, of::PortStatsEntry> ports;
  std::map<uint32_t, size_t> host_at;
  SwitchCounters counters;

  uint64_t generation = 0;
  bool connected = false;
  int64_t connected_ms = 0;
  std::shared_ptr<net::Transport> transport;
  std::shared_ptr<net::TcpConnection> tcp;
  std::shared_ptr<net::LoopbackLink> link;
  std::shared_ptr<net::ByteSink> sink;
  std::shared_ptr<net::ByteSink> peer_sink;
  of::FrameAssembler frames;
  uint32_t next_xid = 0x10000000;
  uint32_t sync_xid = 0;
  bool sync_done = false;
  uint64_t next_tag = 1;
  std::optional<Pending> pending;
};

class SimFabric::Sink : public net::ByteSink {
 public:
  Sink(SimFabric* fabric, size_t index, uint64_t generation)
      : fabric_(fabric), index_(index), generation_(generation) {}
  void on_bytes(std::span<const uint8_t> bytes) override { fabric_->on_bytes(index_, generation_, bytes); }
  void on_close() override { fabric_->on_close(index_, generation_); }

 private:
  SimFabric* fabric_;
  size_t index_;
  uint64_t generation_;
};

SimFabric::SimFabric(TopologySpec spec, std::shared_ptr<ManualClock> clock, SimOptions options)
    : spec_(std::move(spec)), clock_(std::move(clock)), options_(options) {
  validate_topology(spec_);
  if (options_.tick_ms <= 0) throw SimError("tick must be positive");
  for (const auto& s : spec_.switches) {
    auto sw = std::make_unique<Switch>();
    sw->index = switches_.size();
    sw->spec = s;
    for (uint32_t p = 1; p <= s.ports; ++p) sw->ports[p].port_no = p;
    switches_.push_back(std::move(sw));
  }
  for (size_t i = 0; i < spec_.hosts.size(); ++i) {
    const auto& h = spec_.hosts[i];
    sw(h.switch_name).host_at[h.port] = i;
    hosts_.push_back(HostLedger{h.name, 0, 0, {}});
  }
  auto flows = spec_.flows;
  spec_.flows.clear();
  for (auto& f : flows) add_flow(std::move(f));
}

SimFabric::~SimFabric() {
  for (auto& s : switches_) {
    std::shared_ptr<net::Transport> t;
    std::shared_ptr<net::TcpConnection> tcp;
    {
      std::lock_guard lock(mu_);
      ++s->generation;
      s->connected = false;
      t = s->transport;
      tcp = s->tcp;
    }
    if (t) t->close();
    if (tcp) tcp->join();
  }
}

SimFabric::Switch& SimFabric::sw(const std::string& name) {
  for (auto& s : switches_) {
    if (s->spec.name == name) return *s;
  }
  throw SimError("unknown switch '" + name + "'");
}

const SimFabric::Switch& SimFabric::sw(const std::string& name) const {
  return const_cast<SimFabric*>(this)->sw(name);
}

const SimFabric::Switch* SimFabric::sw_by_dp(uint64_t dp_id) const {
  for (const auto& s : switches_) {
    if (s->spec.dp_id == dp_id) return s.get();
  }
  return nullptr;
}

void SimFabric::set_switch_options(const std::string& name, SwitchTestOptions options) {
  std::lock_guard lock(mu_);
  sw(name).test = options;
}

void SimFabric::add_flow(FlowSpec flow) {
  validate_flow(spec_, flow);
  std::lock_guard lock(mu_);
  for (const auto& f : flows_) {
    if (f->spec.name == flow.name) throw TopologyError("duplicate flow '" + flow.name + "'");
  }
  auto f = std::make_unique<Flow>();
  for (size_t i = 0; i < spec_.hosts.size(); ++i) {
    if (spec_.hosts[i].name == flow.src) f->src_host = i;
    if (spec_.hosts[i].name == flow.dst) f->dst_host = i;
  }
  f->header = FrameHeader{spec_.hosts[f->src_host].mac, spec_.hosts[f->dst_host].mac, flow.eth_type, flow.ip_proto};
  f->ledger.name = flow.name;
  f->spec = flow;
  spec_.flows.push_back(std::move(flow));
  flows_.push_back(std::move(f));
}

void SimFabric::on_tick(std::function<void(int64_t)> hook) { hooks_.push_back(std::move(hook)); }

void SimFabric::bind_session(Switch& s) {
  ++s.generation;
  s.connected = true;
  s.connected_ms = clock_->now_ms();
  s.frames = of::FrameAssembler{};
  s.pending.reset();
  s.sink = std::make_shared<Sink>(this, s.index, s.generation);
}

void SimFabric::connect(controller::Controller& ctl) {
  for (auto& s : switches_) connect(s->spec.name, ctl);
}

void SimFabric::connect(const std::string& name, controller::Controller& ctl) {
  Switch& s = sw(name);
  auto link = std::make_shared<net::LoopbackLink>("controller", "sim:" + name);
  {
    std::lock_guard lock(mu_);
    if (s.connected) throw SimError("switch '" + name + "' already connected");
    bind_session(s);
    s.transport = link->b();
    s.link = link;
    s.tcp.reset();
  }
  link->bind_b(s.sink);
  ctl.attach(link->a(), [&](std::shared_ptr<net::ByteSink> sink) {
    link->bind_a(sink);
    std::lock_guard lock(mu_);
    s.peer_sink = std::move(sink);
  });
  send_hello(s);
}

void SimFabric::connect_tcp(const std::string& host, int port) {
  for (auto& s : switches_) connect_tcp(s->spec.name, host, port);
}

void SimFabric::connect_tcp(const std::string& name, const std::string& host, int port) {
  Switch& s = sw(name);
  {
    std::lock_guard lock(mu_);
    if (s.connected) throw SimError("switch '" + name + "' already connected");
  }
  auto conn = net::tcp_connect(host, port);
  std::shared_ptr<net::ByteSink> sink;
  std::shared_ptr<net::TcpConnection> old;
  {
    std::lock_guard lock(mu_);
    old = std::move(s.tcp);
    bind_session(s);
    s.transport = conn;
    s.tcp = conn;
    s.link.reset();
    sink = s.sink;
  }
  if (old) old->join();
  conn->start(sink);
  send_hello(s);
}

void SimFabric::send_hello(Switch& s) {
  std::shared_ptr<net::Transport> t;
  std::vector<uint8_t> bytes;
  {
    std::lock_guard lock(mu_);
    if (!s.connected) return;
    t = s.transport;
    bytes = s.test.of10_hello ? kOf10Hello : of::encode(of::Message{s.next_xid++, of::Hello{}});
  }
  t->send(std::move(bytes));
}

void SimFabric::disconnect(const std::string& name) {
  Switch& s = sw(name);
  std::shared_ptr<net::Transport> t;
  std::shared_ptr<net::TcpConnection> tcp;
  {
    std::lock_guard lock(mu_);
    t = s.transport;
    tcp = s.tcp;
  }
  if (t) t->close();
  if (tcp) tcp->join();
  std::lock_guard lock(mu_);
  s.connected = false;
  s.peer_sink.reset();
  sync_cv_.notify_all();
}

bool SimFabric::connected(const std::string& name) const {
  std::lock_guard lock(mu_);
  return sw(name).connected;
}

void SimFabric::on_close(size_t index, uint64_t generation) {
  std::lock_guard lock(mu_);
  Switch& s = *switches_[index];
  if (s.generation != generation) return;
  s.connected = false;
  sync_cv_.notify_all();
}

void SimFabric::on_bytes(size_t index, uint64_t generation, std::span<const uint8_t> bytes) {
  Outbox out;
  {
    std::lock_guard lock(mu_);
    Switch& s = *switches_[index];
    if (s.generation != generation || !s.connected) return;
    std::vector<std::vector<uint8_t>> frames;
    try {
      frames = s.frames.feed(bytes);
    } catch (const of::FramingError& e) {
      spdlog::warn("sim {}: {}", s.spec.name, e.what());
      return;
    }
    for (const auto& frame : frames) {
      auto result = of::decode(frame);
      if (!result.ok()) {
        spdlog::debug("sim {}: {}", s.spec.name, result.error().message);
        continue;
      }
      handle_message_locked(s, result.message(), out);
    }
  }
  send_frames(out);
}

void SimFabric::send_frames(Outbox& out) {
  for (auto& [t, bytes] : out.sends) t->send(std::move(bytes));
  out.sends.clear();
}

void SimFabric::handle_message_locked(Switch& s, const of::Message& msg, Outbox& out) {
  const auto& t = s.transport;
  if (msg.is<of::EchoRequest>()) {
    out.push(t, msg.xid, of::EchoReply{msg.as<of::EchoRequest>().payload});
  } else if (msg.is<of::EchoReply>()) {
    if (msg.xid == s.sync_xid) {
      s.sync_done = true;
      sync_cv_.notify_all();
    }
  } else if (msg.is<of::FeaturesRequest>()) {
    of::FeaturesReply reply;
    reply.datapath_id = s.test.fake_dp_id.value_or(s.spec.dp_id);
    reply.n_tables = s.tables.n_tables();
    reply.capabilities = kCapFlowStats | kCapPortStats;
    out.push(t, msg.xid, reply);
  } else if (msg.is<of::FlowMod>()) {
    ++s.counters.flow_mods;
    const auto outcome = s.tables.apply(msg.as<of::FlowMod>(), clock_->now_ms());
    if (!outcome.ok) {
      ++s.counters.flow_mod_errors;
      auto data = of::encode(msg);
      data.resize(std::min<size_t>(data.size(), 64));
      out.push(t, msg.xid, of::Error{outcome.error_type, outcome.error_code, std::move(data)});
    }
  } else if (msg.is<of::BarrierRequest>()) {
    ++s.counters.barriers;
    if (!s.test.drop_barriers) out.push(t, msg.xid, of::BarrierReply{});
  } else if (msg.is<of::PacketOut>()) {
    ++s.counters.packet_outs;
    handle_packet_out_locked(s, msg.as<of::PacketOut>());
  } else if (msg.is<of::MultipartRequest>()) {
    const auto& req = msg.as<of::MultipartRequest>();
    if (std::holds_alternative<of::DescRequest>(req.body)) {
      out.push(t, msg.xid, of::MultipartReply{0, of::DescReply{"sdx", "simulated switch", "sdxsim", "", s.spec.name}});
      return;
    }
    ++s.counters.stats_requests;
    if (s.test.stall_stats) return;
    const uint32_t want = std::get<of::PortStatsRequest>(req.body).port_no;
    const int64_t up_ms = clock_->now_ms() - s.connected_ms;
    std::vector<of::PortStatsEntry> entries;
    for (const auto& [port, c] : s.ports) {
      if (want != of::port::kAny && want != port) continue;
      auto e = c;
      e.duration_sec = static_cast<uint32_t>(up_ms / 1000);
      e.duration_nsec = static_cast<uint32_t>(up_ms % 1000 * 1000000);
      entries.push_back(e);
    }
    out.push(t, msg.xid, of::MultipartReply{0, std::move(entries)});
  } else if (msg.is<of::Error>()) {
    const auto& e = msg.as<of::Error>();
    spdlog::debug("sim {}: controller error type={} code={}", s.spec.name, e.type, e.code);
  }
}

void SimFabric::handle_packet_out_locked(Switch& s, const of::PacketOut& po) {
  auto tag = frame_tag(po.frame);
  if (!tag || !s.pending || s.pending->tag != *tag) return;
  Pending p = std::move(*s.pending);
  s.pending.reset();
  for (const auto& a : po.actions) {
    if (a.port == of::port::kAll || a.port == of::port::kFlood) {
      for (const auto& [port, c] : s.ports) {
        if (port != p.in_port) p.path.copies.emplace_back(port, Role::kForward);
      }
    } else if (a.port != p.in_port && s.ports.count(a.port) != 0) {
      p.path.copies.emplace_back(a.port, Role::kForward);
    }
  }
  if (p.flow != nullptr) --p.flow->ledger.in_flight;
  account_locked(s, p.path, p.in_port, p.header, p.bytes, 1, p.flow);
}

SimFabric::Path SimFabric::walk_locked(Switch& s, uint32_t in_port, const FrameHeader& h) {
  Path path;
  uint8_t table = 0;
  while (true) {
    const InstalledFlow* e = s.tables.lookup(table, in_port, h);
    if (e == nullptr) {
      path.miss = true;
      return path;
    }
    path.hits.push_back(e->seq);
    std::vector<uint32_t> outputs;
    std::optional<uint8_t> next;
    for (const auto& ins : e->instructions) {
      if (const auto* apply = std::get_if<of::ApplyActions>(&ins)) {
        for (const auto& a : apply->actions) outputs.push_back(a.port);
      } else {
        next = std::get<of::GotoTable>(ins).table_id;
      }
    }
    const auto info = rules::decode_cookie(e->cookie);
    const bool redirect = table == 0 && info && info->kind == rules::CookieKind::kAclRedirect;
    for (size_t i = 0; i < outputs.size(); ++i) {
      const uint32_t port = outputs[i];
      if (port == of::port::kController) {
        path.to_controller = true;
        path.controller_table = table;
        path.controller_cookie = e->cookie;
        path.controller_reason = e->priority == 0 && e->match.empty() ? of::packet_in_reason::kNoMatch
                                                                       : of::packet_in_reason::kAction;
        continue;
      }
      if (port == in_port || s.ports.count(port) == 0) continue;
      Role role = Role::kForward;
      if (table == 0) role = redirect && i + 1 == outputs.size() ? Role::kRedirect : Role::kMirror;
      path.copies.emplace_back(port, role);
    }
    if (!next || *next <= table) return path;
    table = *next;
  }
}

void SimFabric::account_locked(Switch& s, const Path& path, uint32_t in_port, const FrameHeader& h,
                               uint32_t bytes, uint64_t count, Flow* flow) {
  if (path.miss) s.ports[in_port].rx_dropped += count;
  bool redirected = false;
  bool delivered = false;
  uint64_t mirrors = 0;
  uint64_t extra_forwards = 0;
  std::optional<uint32_t> dst_port;
  if (flow != nullptr) {
    const auto& dst = spec_.hosts[flow->dst_host];
    if (dst.switch_name == s.spec.name) dst_port = dst.port;
  }
  for (const auto& [port, role] : path.copies) {
    auto& c = s.ports[port];
    c.tx_packets += count;
    c.tx_bytes += count * bytes;
    if (auto it = s.host_at.find(port); it != s.host_at.end()) {
      auto& ledger = hosts_[it->second];
      ledger.received += count;
      ledger.received_by_class[TrafficClass{h.eth_type, h.ip_proto}] += count;
    }
    switch (role) {
      case Role::kMirror: ++mirrors; break;
      case Role::kRedirect: redirected = true; break;
      case Role::kForward:
        if (dst_port == port && !delivered) {
          delivered = true;
        } else {
          ++extra_forwards;
        }
        break;
    }
  }
  if (flow == nullptr) return;
  auto& l = flow->ledger;
  l.mirrored += mirrors * count;
  l.flooded += extra_forwards * count;
  if (redirected) {
    l.redirected += count;
  } else if (delivered) {
    l.delivered += count;
  } else {
    l.dropped += count;
  }
}

void SimFabric::inject(size_t src_host, const FrameHeader& h, uint32_t bytes, uint64_t count, Flow* flow,
                       uint64_t& packet_ins) {
  const HostSpec& host = spec_.hosts[src_host];
  Switch& s = sw(host.switch_name);
  uint64_t remaining = count;
  while (remaining > 0) {
    Outbox out;
    bool await = false;
    {
      std::lock_guard lock(mu_);
      const int64_t now = clock_->now_ms();
      Path path = walk_locked(s, host.port, h);
      const bool punt = path.to_controller && s.connected;
      const uint64_t n = punt ? 1 : remaining;
      for (uint64_t seq : path.hits) s.tables.record_hit(seq, n, n * bytes, now);
      auto& rx = s.ports[host.port];
      rx.rx_packets += n;
      rx.rx_bytes += n * bytes;
      hosts_[src_host].sent += n;
      if (flow != nullptr) {
        flow->ledger.sent += n;
        flow->ledger.bytes_sent += n * bytes;
      }
      if (punt) {
        Pending p{s.next_tag++, flow, h, bytes, host.port, path};
        of::PacketIn pi;
        pi.buffer_id = of::kNoBuffer;
        pi.total_len = static_cast<uint16_t>(std::min<uint32_t>(bytes, 0xffff));
        pi.reason = path.controller_reason;
        pi.table_id = path.controller_table;
        pi.cookie = path.controller_cookie;
        pi.match.in_port = host.port;
        pi.frame = synth_frame(h, bytes, p.tag);
        out.push(s.transport, s.next_xid++, std::move(pi));
        ++s.counters.packet_ins;
        ++packet_ins;
        if (flow != nullptr) ++flow->ledger.in_flight;
        s.pending = std::move(p);
        await = true;
      } else {
        account_locked(s, path, host.port, h, bytes, n, flow);
      }
      remaining -= n;
    }
    if (!await) continue;
    send_frames(out);
    sync(s);
    std::lock_guard lock(mu_);
    if (s.pending) {
      // No PacketOut came back: the controller chose not to forward.
      Pending p = std::move(*s.pending);
      s.pending.reset();
      if (p.flow != nullptr) --p.flow->ledger.in_flight;
      account_locked(s, p.path, p.in_port, p.header, p.bytes, 1, p.flow);
    }
  }
}

void SimFabric::sync(Switch& s) {
  Outbox out;
  {
    std::lock_guard lock(mu_);
    if (!s.connected || !s.tcp) return;
    s.sync_xid = s.next_xid++;
    s.sync_done = false;
    out.push(s.transport, s.sync_xid, of::EchoRequest{{'s', 'y', 'n', 'c'}});
  }
  send_frames(out);
  std::unique_lock lock(mu_);
  sync_cv_.wait_for(lock, options_.sync_timeout, [&] { return s.sync_done || !s.connected; });
}

void SimFabric::announce_hosts() {
  uint64_t ignored = 0;
  for (size_t i = 0; i < spec_.hosts.size(); ++i) {
    FrameHeader h{spec_.hosts[i].mac, of::MacAddress::from_u64(0xffffffffffffull), kEthArp, std::nullopt};
    inject(i, h, kAnnounceBytes, 1, nullptr, ignored);
  }
}

AdvanceSummary SimFabric::advance(double seconds) {
  return advance_ms(static_cast<int64_t>(std::llround(seconds * 1000.0)));
}

AdvanceSummary SimFabric::advance_ms(int64_t duration_ms) {
  AdvanceSummary sum;
  int64_t now = clock_->now_ms();
  sum.from_ms = now;
  const int64_t end = now + std::max<int64_t>(duration_ms, 0);
  while (now < end) {
    const int64_t next = std::min(now + options_.tick_ms, end);
    clock_->set(next);
    std::vector<Flow*> flows;
    {
      std::lock_guard lock(mu_);
      for (auto& s : switches_) sum.expired_entries += s->tables.expire(next);
      for (auto& f : flows_) flows.push_back(f.get());
    }
    for (Flow* f : flows) {
      const uint64_t n = frames_by(f->spec, next) - frames_by(f->spec, now);
      if (n == 0) continue;
      sum.frames += n;
      inject(f->src_host, f->header, f->spec.bytes, n, f, sum.packet_ins);
    }
    for (auto& hook : hooks_) hook(next);
    now = next;
  }
  sum.to_ms = now;
  return sum;
}

rules::FlowTable SimFabric::read_flow_table(uint64_t dp_id, bool skip_learned) const {
  std::lock_guard lock(mu_);
  const Switch* s = sw_by_dp(dp_id);
  if (s == nullptr) throw SimError("unknown dp_id " + std::to_string(dp_id));
  if (!s->connected) throw SimError("no session");
  auto table = s->tables.snapshot(dp_id, skip_learned);
  table.dp_name = s->spec.name;
  return table;
}

std::vector<of::PortStatsEntry> SimFabric::port_counters(uint64_t dp_id) const {
  std::lock_guard lock(mu_);
  const Switch* s = sw_by_dp(dp_id);
  if (s == nullptr) throw SimError("unknown dp_id " + std::to_string(dp_id));
  std::vector<of::PortStatsEntry> out;
  for (const auto& [port, c] : s->ports) out.push_back(c);
  return out;
}

SwitchCounters SimFabric::switch_counters(const std::string& name) const {
  std::lock_guard lock(mu_);
  return sw(name).counters;
}

FlowLedger SimFabric::flow_ledger(const std::string& name) const {
  std::lock_guard lock(mu_);
  for (const auto& f : flows_) {
    if (f->spec.name == name) return f->ledger;
  }
  throw SimError("unknown flow '" + name + "'");
}

std::vector<FlowLedger> SimFabric::flow_ledgers() const {
  std::lock_guard lock(mu_);
  std::vector<FlowLedger> out;
  for (const auto& f : flows_) out.push_back(f->ledger);
  return out;
}

HostLedger SimFabric::host_ledger(const std::string& name) const {
  std::lock_guard lock(mu_);
  for (const auto& h : hosts_) {
    if (h.name == name) return h;
  }
  throw SimError("unknown host '" + name + "'");
}

std::vector<HostLedger> SimFabric::host_ledgers() const {
  std::lock_guard lock(mu_);
  return hosts_;
}

}  // namespace sdx::sim
