#include "sdx/openflow/messages.h"

#include <algorithm>
#include <cstdio>

namespace sdx::of {

std::string_view msg_type_name(MsgType type) {
  switch (type) {
    case MsgType::kHello: return "HELLO";
    case MsgType::kError: return "ERROR";
    case MsgType::kEchoRequest: return "ECHO_REQUEST";
    case MsgType::kEchoReply: return "ECHO_REPLY";
    case MsgType::kFeaturesRequest: return "FEATURES_REQUEST";
    case MsgType::kFeaturesReply: return "FEATURES_REPLY";
    case MsgType::kPacketIn: return "PACKET_IN";
    case MsgType::kPortStatus: return "PORT_STATUS";
    case MsgType::kPacketOut: return "PACKET_OUT";
    case MsgType::kFlowMod: return "FLOW_MOD";
    case MsgType::kMultipartRequest: return "MULTIPART_REQUEST";
    case MsgType::kMultipartReply: return "MULTIPART_REPLY";
    case MsgType::kBarrierRequest: return "BARRIER_REQUEST";
    case MsgType::kBarrierReply: return "BARRIER_REPLY";
  }
  return "UNKNOWN";
}

std::string_view command_name(FlowModCommand cmd) {
  switch (cmd) {
    case FlowModCommand::kAdd: return "ADD";
    case FlowModCommand::kModify: return "MODIFY";
    case FlowModCommand::kModifyStrict: return "MODIFY_STRICT";
    case FlowModCommand::kDelete: return "DELETE";
    case FlowModCommand::kDeleteStrict: return "DELETE_STRICT";
  }
  return "UNKNOWN";
}

std::optional<MacAddress> MacAddress::parse(std::string_view text) {
  if (text.size() != 17) return std::nullopt;
  MacAddress mac;
  for (size_t i = 0; i < 6; ++i) {
    if (i > 0 && text[i * 3 - 1] != ':') return std::nullopt;
    unsigned value = 0;
    for (size_t k = 0; k < 2; ++k) {
      const char c = text[i * 3 + k];
      value <<= 4;
      if (c >= '0' && c <= '9') {
        value |= static_cast<unsigned>(c - '0');
      } else if (c >= 'a' && c <= 'f') {
        value |= static_cast<unsigned>(c - 'a' + 10);
      } else if (c >= 'A' && c <= 'F') {
        value |= static_cast<unsigned>(c - 'A' + 10);
      } else {
        return std::nullopt;
      }
    }
    mac.bytes[i] = static_cast<uint8_t>(value);
  }
  return mac;
}

MacAddress MacAddress::from_u64(uint64_t value) {
  MacAddress mac;
  for (int i = 5; i >= 0; --i) {
    mac.bytes[static_cast<size_t>(i)] = static_cast<uint8_t>(value);
    value >>= 8;
  }
  return mac;
}

std::string MacAddress::to_string() const {
  char buf[18];
  std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x", bytes[0], bytes[1], bytes[2],
                bytes[3], bytes[4], bytes[5]);
  return buf;
}

bool MacAddress::is_broadcast() const {
  return std::all_of(bytes.begin(), bytes.end(), [](uint8_t b) { return b == 0xff; });
}

bool Match::empty() const {
  return !in_port && !eth_dst && !eth_src && !eth_type && !vlan_vid && !ip_proto && extra.empty();
}

namespace {

template <typename T>
bool field_covered(const std::optional<T>& mine, const std::optional<T>& theirs) {
  return !mine || (theirs && *mine == *theirs);
}

}  // namespace

bool Match::covered_by(const Match& other) const {
  if (!field_covered(in_port, other.in_port) || !field_covered(eth_dst, other.eth_dst) ||
      !field_covered(eth_src, other.eth_src) || !field_covered(eth_type, other.eth_type) ||
      !field_covered(vlan_vid, other.vlan_vid) || !field_covered(ip_proto, other.ip_proto)) {
    return false;
  }
  return std::all_of(extra.begin(), extra.end(), [&](const OpaqueOxm& x) {
    return std::find(other.extra.begin(), other.extra.end(), x) != other.extra.end();
  });
}

std::string Match::to_string() const {
  if (empty()) return "any";
  std::string out;
  auto add = [&](const std::string& part) {
    if (!out.empty()) out += ',';
    out += part;
  };
  char buf[32];
  if (in_port) add("in_port=" + std::to_string(*in_port));
  if (eth_dst) add("eth_dst=" + eth_dst->to_string());
  if (eth_src) add("eth_src=" + eth_src->to_string());
  if (eth_type) {
    std::snprintf(buf, sizeof(buf), "eth_type=0x%04x", *eth_type);
    add(buf);
  }
  if (vlan_vid) add("vlan_vid=" + std::to_string(*vlan_vid));
  if (ip_proto) add("ip_proto=" + std::to_string(*ip_proto));
  for (const auto& x : extra) {
    std::snprintf(buf, sizeof(buf), "oxm(0x%04x:%u%s)=", x.oxm_class, x.field,
                  x.has_mask ? "/m" : "");
    std::string part = buf;
    for (uint8_t b : x.payload) {
      std::snprintf(buf, sizeof(buf), "%02x", b);
      part += buf;
    }
    add(part);
  }
  return out;
}

MsgType Message::type() const {
  struct Visitor {
    MsgType operator()(const Hello&) const { return MsgType::kHello; }
    MsgType operator()(const Error&) const { return MsgType::kError; }
    MsgType operator()(const EchoRequest&) const { return MsgType::kEchoRequest; }
    MsgType operator()(const EchoReply&) const { return MsgType::kEchoReply; }
    MsgType operator()(const FeaturesRequest&) const { return MsgType::kFeaturesRequest; }
    MsgType operator()(const FeaturesReply&) const { return MsgType::kFeaturesReply; }
    MsgType operator()(const PacketIn&) const { return MsgType::kPacketIn; }
    MsgType operator()(const PortStatus&) const { return MsgType::kPortStatus; }
    MsgType operator()(const PacketOut&) const { return MsgType::kPacketOut; }
    MsgType operator()(const FlowMod&) const { return MsgType::kFlowMod; }
    MsgType operator()(const MultipartRequest&) const { return MsgType::kMultipartRequest; }
    MsgType operator()(const MultipartReply&) const { return MsgType::kMultipartReply; }
    MsgType operator()(const BarrierRequest&) const { return MsgType::kBarrierRequest; }
    MsgType operator()(const BarrierReply&) const { return MsgType::kBarrierReply; }
  };
  return std::visit(Visitor{}, body);
}

}  // namespace sdx::of
