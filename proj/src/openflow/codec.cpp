#include "sdx/openflow/codec.h"

#include <cstdio>

namespace sdx::of {

std::string_view decode_error_kind_name(DecodeError::Kind kind) {
  switch (kind) {
    case DecodeError::Kind::kTruncated: return "truncated";
    case DecodeError::Kind::kBadLength: return "bad_length";
    case DecodeError::Kind::kBadVersion: return "bad_version";
    case DecodeError::Kind::kUnknownType: return "unknown_type";
    case DecodeError::Kind::kMalformed: return "malformed";
  }
  return "?";
}

namespace {

constexpr uint16_t kOxmClassBasic = 0x8000;
constexpr uint16_t kMatchTypeOxm = 1;
constexpr uint16_t kInstrGotoTable = 1;
constexpr uint16_t kInstrApplyActions = 4;
constexpr uint16_t kActionOutput = 0;
constexpr size_t kPortStatsSize = 112;
constexpr size_t kPortDescSize = 64;
constexpr size_t kDescStrLen = 256;
constexpr size_t kSerialNumLen = 32;
constexpr size_t kPortNameLen = 16;

enum OxmField : uint8_t {
  kOxmInPort = 0,
  kOxmEthDst = 3,
  kOxmEthSrc = 4,
  kOxmEthType = 5,
  kOxmVlanVid = 6,
  kOxmIpProto = 10,
};

bool is_modeled_field(uint8_t field) {
  switch (field) {
    case kOxmInPort:
    case kOxmEthDst:
    case kOxmEthSrc:
    case kOxmEthType:
    case kOxmVlanVid:
    case kOxmIpProto: return true;
    default: return false;
  }
}

class Writer {
 public:
  void u8(uint8_t v) { out_.push_back(v); }
  void u16(uint16_t v) {
    u8(static_cast<uint8_t>(v >> 8));
    u8(static_cast<uint8_t>(v));
  }
  void u32(uint32_t v) {
    u16(static_cast<uint16_t>(v >> 16));
    u16(static_cast<uint16_t>(v));
  }
  void u64(uint64_t v) {
    u32(static_cast<uint32_t>(v >> 32));
    u32(static_cast<uint32_t>(v));
  }
  void bytes(std::span<const uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  void pad(size_t n) { out_.insert(out_.end(), n, 0); }
  void fixed_string(const std::string& s, size_t width) {
    if (s.size() >= width || s.find('\0') != std::string::npos) {
      throw EncodeError("string field does not fit " + std::to_string(width) + " bytes");
    }
    out_.insert(out_.end(), s.begin(), s.end());
    pad(width - s.size());
  }
  void patch16(size_t at, uint16_t v) {
    out_[at] = static_cast<uint8_t>(v >> 8);
    out_[at + 1] = static_cast<uint8_t>(v);
  }
  size_t size() const { return out_.size(); }
  std::vector<uint8_t> take() { return std::move(out_); }

 private:
  std::vector<uint8_t> out_;
};

struct Malformed {
  std::string what;
};

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> data) : data_(data) {}

  size_t remaining() const { return data_.size() - pos_; }
  size_t pos() const { return pos_; }

  void need(size_t n, const char* what) const {
    if (remaining() < n) throw Malformed{std::string(what) + ": body too short"};
  }
  uint8_t u8() {
    need(1, "u8");
    return data_[pos_++];
  }
  uint16_t u16() {
    need(2, "u16");
    uint16_t v = static_cast<uint16_t>(data_[pos_] << 8 | data_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  uint32_t u32() {
    uint32_t hi = u16();
    return hi << 16 | u16();
  }
  uint64_t u64() {
    uint64_t hi = u32();
    return hi << 32 | u32();
  }
  std::span<const uint8_t> take(size_t n, const char* what) {
    need(n, what);
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::vector<uint8_t> rest() {
    auto s = data_.subspan(pos_);
    pos_ = data_.size();
    return {s.begin(), s.end()};
  }
  void skip(size_t n, const char* what) { take(n, what); }
  std::string fixed_string(size_t width) {
    auto s = take(width, "string");
    size_t len = 0;
    while (len < s.size() && s[len] != 0) ++len;
    return std::string(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(len));
  }
  Reader sub(size_t n, const char* what) { return Reader(take(n, what)); }
  void expect_end(const char* what) const {
    if (remaining() != 0) throw Malformed{std::string(what) + ": trailing bytes"};
  }

 private:
  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

void oxm_header(Writer& w, uint8_t field, uint8_t len) {
  w.u16(kOxmClassBasic);
  w.u8(static_cast<uint8_t>(field << 1));
  w.u8(len);
}

void write_match(Writer& w, const Match& m) {
  const size_t start = w.size();
  w.u16(kMatchTypeOxm);
  w.u16(0);
  if (m.in_port) {
    oxm_header(w, kOxmInPort, 4);
    w.u32(*m.in_port);
  }
  if (m.eth_dst) {
    oxm_header(w, kOxmEthDst, 6);
    w.bytes(m.eth_dst->bytes);
  }
  if (m.eth_src) {
    oxm_header(w, kOxmEthSrc, 6);
    w.bytes(m.eth_src->bytes);
  }
  if (m.eth_type) {
    oxm_header(w, kOxmEthType, 2);
    w.u16(*m.eth_type);
  }
  if (m.vlan_vid) {
    oxm_header(w, kOxmVlanVid, 2);
    w.u16(*m.vlan_vid);
  }
  if (m.ip_proto) {
    oxm_header(w, kOxmIpProto, 1);
    w.u8(*m.ip_proto);
  }
  for (const auto& x : m.extra) {
    if (x.oxm_class == kOxmClassBasic && !x.has_mask && is_modeled_field(x.field)) {
      throw EncodeError("opaque OXM duplicates a modeled field");
    }
    if (x.field > 0x7f || x.payload.size() > 0xff) throw EncodeError("opaque OXM out of range");
    w.u16(x.oxm_class);
    w.u8(static_cast<uint8_t>(x.field << 1 | (x.has_mask ? 1 : 0)));
    w.u8(static_cast<uint8_t>(x.payload.size()));
    w.bytes(x.payload);
  }
  const size_t len = w.size() - start;
  if (len > 0xffff) throw EncodeError("match too long");
  w.patch16(start + 2, static_cast<uint16_t>(len));
  w.pad((8 - len % 8) % 8);
}

Match read_match(Reader& r) {
  const uint16_t type = r.u16();
  const uint16_t len = r.u16();
  if (type != kMatchTypeOxm) throw Malformed{"malformed OXM: match type " + std::to_string(type)};
  if (len < 4) throw Malformed{"malformed OXM: match length " + std::to_string(len)};
  Reader fields = r.sub(len - 4u, "match");
  const size_t padded = (len + 7u) / 8u * 8u;
  r.skip(padded - len, "match padding");

  Match m;
  while (fields.remaining() > 0) {
    if (fields.remaining() < 4) throw Malformed{"malformed OXM: partial TLV header"};
    const uint16_t oxm_class = fields.u16();
    const uint8_t field_mask = fields.u8();
    const uint8_t plen = fields.u8();
    const uint8_t field = field_mask >> 1;
    const bool has_mask = (field_mask & 1) != 0;
    if (fields.remaining() < plen) throw Malformed{"malformed OXM: TLV overruns match"};
    Reader value = fields.sub(plen, "oxm");
    if (oxm_class != kOxmClassBasic || has_mask || !is_modeled_field(field)) {
      auto payload = value.rest();
      m.extra.push_back({oxm_class, field, has_mask, std::move(payload)});
      continue;
    }
    auto expect_len = [&](uint8_t want) {
      if (plen != want) {
        throw Malformed{"malformed OXM: field " + std::to_string(field) + " length " +
                        std::to_string(plen)};
      }
    };
    auto once = [&](bool present) {
      if (present) throw Malformed{"malformed OXM: duplicate field " + std::to_string(field)};
    };
    switch (field) {
      case kOxmInPort:
        expect_len(4);
        once(m.in_port.has_value());
        m.in_port = value.u32();
        break;
      case kOxmEthDst:
      case kOxmEthSrc: {
        expect_len(6);
        auto& slot = field == kOxmEthDst ? m.eth_dst : m.eth_src;
        once(slot.has_value());
        MacAddress mac;
        auto b = value.take(6, "mac");
        std::copy(b.begin(), b.end(), mac.bytes.begin());
        slot = mac;
        break;
      }
      case kOxmEthType:
        expect_len(2);
        once(m.eth_type.has_value());
        m.eth_type = value.u16();
        break;
      case kOxmVlanVid:
        expect_len(2);
        once(m.vlan_vid.has_value());
        m.vlan_vid = value.u16();
        break;
      case kOxmIpProto:
        expect_len(1);
        once(m.ip_proto.has_value());
        m.ip_proto = value.u8();
        break;
    }
  }
  return m;
}

void write_actions(Writer& w, const std::vector<OutputAction>& actions) {
  for (const auto& a : actions) {
    w.u16(kActionOutput);
    w.u16(16);
    w.u32(a.port);
    w.u16(a.max_len);
    w.pad(6);
  }
}

std::vector<OutputAction> read_actions(Reader r) {
  std::vector<OutputAction> out;
  while (r.remaining() > 0) {
    const uint16_t type = r.u16();
    const uint16_t len = r.u16();
    if (len < 8 || len % 8 != 0) throw Malformed{"action length " + std::to_string(len)};
    if (type != kActionOutput) throw Malformed{"unsupported action type " + std::to_string(type)};
    if (len != 16) throw Malformed{"output action length " + std::to_string(len)};
    OutputAction a;
    a.port = r.u32();
    a.max_len = r.u16();
    r.skip(6, "action padding");
    out.push_back(a);
  }
  return out;
}

void write_instructions(Writer& w, const std::vector<Instruction>& instructions) {
  for (const auto& ins : instructions) {
    if (const auto* apply = std::get_if<ApplyActions>(&ins)) {
      const size_t len = 8 + 16 * apply->actions.size();
      if (len > 0xffff) throw EncodeError("instruction too long");
      w.u16(kInstrApplyActions);
      w.u16(static_cast<uint16_t>(len));
      w.pad(4);
      write_actions(w, apply->actions);
    } else {
      w.u16(kInstrGotoTable);
      w.u16(8);
      w.u8(std::get<GotoTable>(ins).table_id);
      w.pad(3);
    }
  }
}

std::vector<Instruction> read_instructions(Reader& r) {
  std::vector<Instruction> out;
  while (r.remaining() > 0) {
    const uint16_t type = r.u16();
    const uint16_t len = r.u16();
    if (len < 8 || len % 8 != 0) throw Malformed{"instruction length " + std::to_string(len)};
    Reader body = r.sub(len - 4u, "instruction");
    if (type == kInstrGotoTable) {
      if (len != 8) throw Malformed{"goto_table length " + std::to_string(len)};
      GotoTable g;
      g.table_id = body.u8();
      out.emplace_back(g);
    } else if (type == kInstrApplyActions) {
      body.skip(4, "instruction padding");
      out.emplace_back(ApplyActions{read_actions(body)});
    } else {
      throw Malformed{"unsupported instruction type " + std::to_string(type)};
    }
  }
  return out;
}

void write_port_desc(Writer& w, const PortDesc& p) {
  w.u32(p.port_no);
  w.pad(4);
  w.bytes(p.hw_addr.bytes);
  w.pad(2);
  w.fixed_string(p.name, kPortNameLen);
  for (uint32_t v : {p.config, p.state, p.curr, p.advertised, p.supported, p.peer, p.curr_speed,
                     p.max_speed}) {
    w.u32(v);
  }
}

PortDesc read_port_desc(Reader& r) {
  PortDesc p;
  p.port_no = r.u32();
  r.skip(4, "port padding");
  auto mac = r.take(6, "hw_addr");
  std::copy(mac.begin(), mac.end(), p.hw_addr.bytes.begin());
  r.skip(2, "port padding");
  p.name = r.fixed_string(kPortNameLen);
  for (uint32_t* v : {&p.config, &p.state, &p.curr, &p.advertised, &p.supported, &p.peer,
                      &p.curr_speed, &p.max_speed}) {
    *v = r.u32();
  }
  return p;
}

void write_port_stats(Writer& w, const PortStatsEntry& s) {
  w.u32(s.port_no);
  w.pad(4);
  for (uint64_t v : {s.rx_packets, s.tx_packets, s.rx_bytes, s.tx_bytes, s.rx_dropped, s.tx_dropped,
                     s.rx_errors, s.tx_errors, s.rx_frame_err, s.rx_over_err, s.rx_crc_err,
                     s.collisions}) {
    w.u64(v);
  }
  w.u32(s.duration_sec);
  w.u32(s.duration_nsec);
}

PortStatsEntry read_port_stats(Reader& r) {
  PortStatsEntry s;
  s.port_no = r.u32();
  r.skip(4, "port stats padding");
  for (uint64_t* v : {&s.rx_packets, &s.tx_packets, &s.rx_bytes, &s.tx_bytes, &s.rx_dropped,
                      &s.tx_dropped, &s.rx_errors, &s.tx_errors, &s.rx_frame_err, &s.rx_over_err,
                      &s.rx_crc_err, &s.collisions}) {
    *v = r.u64();
  }
  s.duration_sec = r.u32();
  s.duration_nsec = r.u32();
  return s;
}

struct BodyWriter {
  Writer& w;

  void operator()(const Hello& m) { w.bytes(m.elements); }
  void operator()(const Error& m) {
    w.u16(m.type);
    w.u16(m.code);
    w.bytes(m.data);
  }
  void operator()(const EchoRequest& m) { w.bytes(m.payload); }
  void operator()(const EchoReply& m) { w.bytes(m.payload); }
  void operator()(const FeaturesRequest&) {}
  void operator()(const FeaturesReply& m) {
    w.u64(m.datapath_id);
    w.u32(m.n_buffers);
    w.u8(m.n_tables);
    w.u8(m.auxiliary_id);
    w.pad(2);
    w.u32(m.capabilities);
    w.u32(0);
  }
  void operator()(const PacketIn& m) {
    w.u32(m.buffer_id);
    w.u16(m.total_len);
    w.u8(m.reason);
    w.u8(m.table_id);
    w.u64(m.cookie);
    write_match(w, m.match);
    w.pad(2);
    w.bytes(m.frame);
  }
  void operator()(const PortStatus& m) {
    w.u8(m.reason);
    w.pad(7);
    write_port_desc(w, m.desc);
  }
  void operator()(const PacketOut& m) {
    const size_t actions_len = 16 * m.actions.size();
    if (actions_len > 0xffff) throw EncodeError("packet-out action list too long");
    w.u32(m.buffer_id);
    w.u32(m.in_port);
    w.u16(static_cast<uint16_t>(actions_len));
    w.pad(6);
    write_actions(w, m.actions);
    w.bytes(m.frame);
  }
  void operator()(const FlowMod& m) {
    w.u64(m.cookie);
    w.u64(m.cookie_mask);
    w.u8(m.table_id);
    w.u8(static_cast<uint8_t>(m.command));
    w.u16(m.idle_timeout);
    w.u16(m.hard_timeout);
    w.u16(m.priority);
    w.u32(m.buffer_id);
    w.u32(m.out_port);
    w.u32(m.out_group);
    w.u16(m.flags);
    w.pad(2);
    write_match(w, m.match);
    write_instructions(w, m.instructions);
  }
  void operator()(const MultipartRequest& m) {
    if (const auto* ps = std::get_if<PortStatsRequest>(&m.body)) {
      w.u16(static_cast<uint16_t>(MultipartType::kPortStats));
      w.u16(m.flags);
      w.pad(4);
      w.u32(ps->port_no);
      w.pad(4);
    } else {
      w.u16(static_cast<uint16_t>(MultipartType::kDesc));
      w.u16(m.flags);
      w.pad(4);
    }
  }
  void operator()(const MultipartReply& m) {
    if (const auto* stats = std::get_if<std::vector<PortStatsEntry>>(&m.body)) {
      w.u16(static_cast<uint16_t>(MultipartType::kPortStats));
      w.u16(m.flags);
      w.pad(4);
      for (const auto& s : *stats) write_port_stats(w, s);
    } else {
      const auto& d = std::get<DescReply>(m.body);
      w.u16(static_cast<uint16_t>(MultipartType::kDesc));
      w.u16(m.flags);
      w.pad(4);
      w.fixed_string(d.mfr_desc, kDescStrLen);
      w.fixed_string(d.hw_desc, kDescStrLen);
      w.fixed_string(d.sw_desc, kDescStrLen);
      w.fixed_string(d.serial_num, kSerialNumLen);
      w.fixed_string(d.dp_desc, kDescStrLen);
    }
  }
  void operator()(const BarrierRequest&) {}
  void operator()(const BarrierReply&) {}
};

Body read_body(MsgType type, Reader& r) {
  switch (type) {
    case MsgType::kHello: return Hello{r.rest()};
    case MsgType::kError: {
      Error e;
      e.type = r.u16();
      e.code = r.u16();
      e.data = r.rest();
      return e;
    }
    case MsgType::kEchoRequest: return EchoRequest{r.rest()};
    case MsgType::kEchoReply: return EchoReply{r.rest()};
    case MsgType::kFeaturesRequest: r.expect_end("features_request"); return FeaturesRequest{};
    case MsgType::kFeaturesReply: {
      FeaturesReply f;
      f.datapath_id = r.u64();
      f.n_buffers = r.u32();
      f.n_tables = r.u8();
      f.auxiliary_id = r.u8();
      r.skip(2, "features padding");
      f.capabilities = r.u32();
      r.skip(4, "features reserved");
      r.expect_end("features_reply");
      return f;
    }
    case MsgType::kPacketIn: {
      PacketIn p;
      p.buffer_id = r.u32();
      p.total_len = r.u16();
      p.reason = r.u8();
      p.table_id = r.u8();
      p.cookie = r.u64();
      p.match = read_match(r);
      r.skip(2, "packet_in padding");
      p.frame = r.rest();
      return p;
    }
    case MsgType::kPortStatus: {
      PortStatus p;
      p.reason = r.u8();
      r.skip(7, "port_status padding");
      Reader desc = r.sub(kPortDescSize, "port desc");
      p.desc = read_port_desc(desc);
      r.expect_end("port_status");
      return p;
    }
    case MsgType::kPacketOut: {
      PacketOut p;
      p.buffer_id = r.u32();
      p.in_port = r.u32();
      const uint16_t actions_len = r.u16();
      r.skip(6, "packet_out padding");
      p.actions = read_actions(r.sub(actions_len, "packet_out actions"));
      p.frame = r.rest();
      return p;
    }
    case MsgType::kFlowMod: {
      FlowMod f;
      f.cookie = r.u64();
      f.cookie_mask = r.u64();
      f.table_id = r.u8();
      const uint8_t command = r.u8();
      if (command > static_cast<uint8_t>(FlowModCommand::kDeleteStrict)) {
        throw Malformed{"flow_mod command " + std::to_string(command)};
      }
      f.command = static_cast<FlowModCommand>(command);
      f.idle_timeout = r.u16();
      f.hard_timeout = r.u16();
      f.priority = r.u16();
      f.buffer_id = r.u32();
      f.out_port = r.u32();
      f.out_group = r.u32();
      f.flags = r.u16();
      r.skip(2, "flow_mod padding");
      f.match = read_match(r);
      f.instructions = read_instructions(r);
      return f;
    }
    case MsgType::kMultipartRequest: {
      MultipartRequest m;
      const uint16_t mp_type = r.u16();
      m.flags = r.u16();
      r.skip(4, "multipart padding");
      if (mp_type == static_cast<uint16_t>(MultipartType::kPortStats)) {
        PortStatsRequest ps;
        ps.port_no = r.u32();
        r.skip(4, "port_stats padding");
        m.body = ps;
      } else if (mp_type == static_cast<uint16_t>(MultipartType::kDesc)) {
        m.body = DescRequest{};
      } else {
        throw Malformed{"unsupported multipart type " + std::to_string(mp_type)};
      }
      r.expect_end("multipart_request");
      return m;
    }
    case MsgType::kMultipartReply: {
      MultipartReply m;
      const uint16_t mp_type = r.u16();
      m.flags = r.u16();
      r.skip(4, "multipart padding");
      if (mp_type == static_cast<uint16_t>(MultipartType::kPortStats)) {
        if (r.remaining() % kPortStatsSize != 0) throw Malformed{"port stats body length"};
        std::vector<PortStatsEntry> entries;
        while (r.remaining() > 0) entries.push_back(read_port_stats(r));
        m.body = std::move(entries);
      } else if (mp_type == static_cast<uint16_t>(MultipartType::kDesc)) {
        DescReply d;
        d.mfr_desc = r.fixed_string(kDescStrLen);
        d.hw_desc = r.fixed_string(kDescStrLen);
        d.sw_desc = r.fixed_string(kDescStrLen);
        d.serial_num = r.fixed_string(kSerialNumLen);
        d.dp_desc = r.fixed_string(kDescStrLen);
        r.expect_end("desc reply");
        m.body = std::move(d);
      } else {
        throw Malformed{"unsupported multipart type " + std::to_string(mp_type)};
      }
      return m;
    }
    case MsgType::kBarrierRequest: r.expect_end("barrier_request"); return BarrierRequest{};
    case MsgType::kBarrierReply: r.expect_end("barrier_reply"); return BarrierReply{};
  }
  throw Malformed{"unreachable"};
}

bool known_type(uint8_t t) {
  switch (static_cast<MsgType>(t)) {
    case MsgType::kHello:
    case MsgType::kError:
    case MsgType::kEchoRequest:
    case MsgType::kEchoReply:
    case MsgType::kFeaturesRequest:
    case MsgType::kFeaturesReply:
    case MsgType::kPacketIn:
    case MsgType::kPortStatus:
    case MsgType::kPacketOut:
    case MsgType::kFlowMod:
    case MsgType::kMultipartRequest:
    case MsgType::kMultipartReply:
    case MsgType::kBarrierRequest:
    case MsgType::kBarrierReply: return true;
  }
  return false;
}

std::string hex_byte(uint8_t v) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "0x%02x", v);
  return buf;
}

}  // namespace

std::vector<uint8_t> encode(const Message& msg) {
  Writer w;
  w.u8(kVersion);
  w.u8(static_cast<uint8_t>(msg.type()));
  w.u16(0);
  w.u32(msg.xid);
  std::visit(BodyWriter{w}, msg.body);
  if (w.size() > kMaxMessageSize) {
    throw EncodeError("message of " + std::to_string(w.size()) + " bytes exceeds 65535");
  }
  w.patch16(2, static_cast<uint16_t>(w.size()));
  return w.take();
}

DecodeResult decode(std::span<const uint8_t> bytes) {
  DecodeError err;
  auto fail = [&](DecodeError::Kind kind, std::string message) {
    err.kind = kind;
    err.message = std::move(message);
    return DecodeResult(std::move(err));
  };
  if (bytes.size() < kHeaderSize) {
    err.frame.assign(bytes.begin(), bytes.end());
    return fail(DecodeError::Kind::kTruncated, "truncated header");
  }
  err.version = bytes[0];
  err.msg_type = bytes[1];
  const uint16_t length = static_cast<uint16_t>(bytes[2] << 8 | bytes[3]);
  err.xid = static_cast<uint32_t>(bytes[4]) << 24 | static_cast<uint32_t>(bytes[5]) << 16 |
            static_cast<uint32_t>(bytes[6]) << 8 | bytes[7];
  const size_t frame_len = std::min<size_t>(bytes.size(), std::max<size_t>(length, kHeaderSize));
  err.frame.assign(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(frame_len));

  if (err.version != kVersion) {
    return fail(DecodeError::Kind::kBadVersion, "unsupported version " + hex_byte(err.version));
  }
  if (length < kHeaderSize) {
    return fail(DecodeError::Kind::kBadLength, "header length " + std::to_string(length) + " < 8");
  }
  if (length > bytes.size()) {
    return fail(DecodeError::Kind::kTruncated, "frame declares " + std::to_string(length) +
                                                   " bytes, have " + std::to_string(bytes.size()));
  }
  if (!known_type(err.msg_type)) {
    return fail(DecodeError::Kind::kUnknownType,
                "unknown message type " + std::to_string(err.msg_type));
  }
  try {
    Reader r(bytes.subspan(kHeaderSize, length - kHeaderSize));
    Message msg;
    msg.xid = err.xid;
    msg.body = read_body(static_cast<MsgType>(err.msg_type), r);
    return DecodeResult(std::move(msg));
  } catch (const Malformed& m) {
    return fail(DecodeError::Kind::kMalformed, m.what);
  }
}

}  // namespace sdx::of
