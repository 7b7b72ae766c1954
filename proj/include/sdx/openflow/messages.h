#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sdx::of {

constexpr uint8_t kVersion = 0x04;
constexpr size_t kHeaderSize = 8;
constexpr size_t kMaxMessageSize = 0xffff;

enum class MsgType : uint8_t {
  kHello = 0,
  kError = 1,
  kEchoRequest = 2,
  kEchoReply = 3,
  kFeaturesRequest = 5,
  kFeaturesReply = 6,
  kPacketIn = 10,
  kPortStatus = 12,
  kPacketOut = 13,
  kFlowMod = 14,
  kMultipartRequest = 18,
  kMultipartReply = 19,
  kBarrierRequest = 20,
  kBarrierReply = 21,
};

std::string_view msg_type_name(MsgType type);

// Reserved port numbers.
namespace port {
constexpr uint32_t kMax = 0xffffff00;
constexpr uint32_t kInPort = 0xfffffff8;
constexpr uint32_t kFlood = 0xfffffffb;
constexpr uint32_t kAll = 0xfffffffc;
constexpr uint32_t kController = 0xfffffffd;
constexpr uint32_t kLocal = 0xfffffffe;
constexpr uint32_t kAny = 0xffffffff;
}  // namespace port

constexpr uint32_t kNoBuffer = 0xffffffff;
constexpr uint8_t kAllTables = 0xff;
constexpr uint16_t kControllerMaxLenNoBuffer = 0xffff;

struct MacAddress {
  std::array<uint8_t, 6> bytes{};

  static std::optional<MacAddress> parse(std::string_view text);
  static MacAddress from_u64(uint64_t value);
  std::string to_string() const;
  bool is_multicast() const { return (bytes[0] & 0x01) != 0; }
  bool is_broadcast() const;

  auto operator<=>(const MacAddress&) const = default;
};

// An OXM TLV we do not model; kept so decode/encode does not lose it.
struct OpaqueOxm {
  uint16_t oxm_class = 0;
  uint8_t field = 0;
  bool has_mask = false;
  std::vector<uint8_t> payload;

  auto operator<=>(const OpaqueOxm&) const = default;
};

// OXM match. Known fields are emitted in OXM field-number order:
// IN_PORT(0), ETH_DST(3), ETH_SRC(4), ETH_TYPE(5), VLAN_VID(6), IP_PROTO(10).
struct Match {
  std::optional<uint32_t> in_port;
  std::optional<MacAddress> eth_dst;
  std::optional<MacAddress> eth_src;
  std::optional<uint16_t> eth_type;
  std::optional<uint16_t> vlan_vid;
  std::optional<uint8_t> ip_proto;
  std::vector<OpaqueOxm> extra;

  bool empty() const;
  // True when every field constrained by `this` is constrained identically by
  // `other` (i.e. `other` is at least as specific).
  bool covered_by(const Match& other) const;
  std::string to_string() const;

  auto operator<=>(const Match&) const = default;
};

struct OutputAction {
  uint32_t port = 0;
  uint16_t max_len = 0;

  auto operator<=>(const OutputAction&) const = default;
};

struct ApplyActions {
  std::vector<OutputAction> actions;
  bool operator==(const ApplyActions&) const = default;
};

struct GotoTable {
  uint8_t table_id = 0;
  bool operator==(const GotoTable&) const = default;
};

using Instruction = std::variant<ApplyActions, GotoTable>;

enum class FlowModCommand : uint8_t {
  kAdd = 0,
  kModify = 1,
  kModifyStrict = 2,
  kDelete = 3,
  kDeleteStrict = 4,
};

std::string_view command_name(FlowModCommand cmd);

struct Hello {
  // Hello elements (e.g. version bitmap), carried verbatim.
  std::vector<uint8_t> elements;
  bool operator==(const Hello&) const = default;
};

struct Error {
  uint16_t type = 0;
  uint16_t code = 0;
  std::vector<uint8_t> data;
  bool operator==(const Error&) const = default;
};

namespace error {
constexpr uint16_t kHelloFailed = 0;
constexpr uint16_t kHelloIncompatible = 0;
constexpr uint16_t kBadRequest = 1;
constexpr uint16_t kBadType = 1;
}  // namespace error

struct EchoRequest {
  std::vector<uint8_t> payload;
  bool operator==(const EchoRequest&) const = default;
};

struct EchoReply {
  std::vector<uint8_t> payload;
  bool operator==(const EchoReply&) const = default;
};

struct FeaturesRequest {
  bool operator==(const FeaturesRequest&) const = default;
};

struct FeaturesReply {
  uint64_t datapath_id = 0;
  uint32_t n_buffers = 0;
  uint8_t n_tables = 0;
  uint8_t auxiliary_id = 0;
  uint32_t capabilities = 0;
  bool operator==(const FeaturesReply&) const = default;
};

struct FlowMod {
  uint64_t cookie = 0;
  uint64_t cookie_mask = 0;
  uint8_t table_id = 0;
  FlowModCommand command = FlowModCommand::kAdd;
  uint16_t idle_timeout = 0;
  uint16_t hard_timeout = 0;
  uint16_t priority = 0;
  uint32_t buffer_id = kNoBuffer;
  uint32_t out_port = port::kAny;
  uint32_t out_group = port::kAny;
  uint16_t flags = 0;
  Match match;
  std::vector<Instruction> instructions;
  bool operator==(const FlowMod&) const = default;
};

namespace packet_in_reason {
constexpr uint8_t kNoMatch = 0;
constexpr uint8_t kAction = 1;
}  // namespace packet_in_reason

struct PacketIn {
  uint32_t buffer_id = kNoBuffer;
  uint16_t total_len = 0;
  uint8_t reason = 0;
  uint8_t table_id = 0;
  uint64_t cookie = 0;
  Match match;
  std::vector<uint8_t> frame;

  uint32_t in_port() const { return match.in_port.value_or(0); }
  bool operator==(const PacketIn&) const = default;
};

struct PacketOut {
  uint32_t buffer_id = kNoBuffer;
  uint32_t in_port = port::kController;
  std::vector<OutputAction> actions;
  std::vector<uint8_t> frame;
  bool operator==(const PacketOut&) const = default;
};

enum class MultipartType : uint16_t { kDesc = 0, kPortStats = 4 };

struct DescRequest {
  bool operator==(const DescRequest&) const = default;
};

struct PortStatsRequest {
  uint32_t port_no = port::kAny;
  bool operator==(const PortStatsRequest&) const = default;
};

struct MultipartRequest {
  uint16_t flags = 0;
  std::variant<DescRequest, PortStatsRequest> body;
  bool operator==(const MultipartRequest&) const = default;
};

struct DescReply {
  std::string mfr_desc;
  std::string hw_desc;
  std::string sw_desc;
  std::string serial_num;
  std::string dp_desc;
  bool operator==(const DescReply&) const = default;
};

struct PortStatsEntry {
  uint32_t port_no = 0;
  uint64_t rx_packets = 0;
  uint64_t tx_packets = 0;
  uint64_t rx_bytes = 0;
  uint64_t tx_bytes = 0;
  uint64_t rx_dropped = 0;
  uint64_t tx_dropped = 0;
  uint64_t rx_errors = 0;
  uint64_t tx_errors = 0;
  uint64_t rx_frame_err = 0;
  uint64_t rx_over_err = 0;
  uint64_t rx_crc_err = 0;
  uint64_t collisions = 0;
  uint32_t duration_sec = 0;
  uint32_t duration_nsec = 0;
  bool operator==(const PortStatsEntry&) const = default;
};

constexpr uint16_t kMultipartReplyMore = 0x0001;

struct MultipartReply {
  uint16_t flags = 0;
  std::variant<DescReply, std::vector<PortStatsEntry>> body;
  bool operator==(const MultipartReply&) const = default;
};

struct BarrierRequest {
  bool operator==(const BarrierRequest&) const = default;
};

struct BarrierReply {
  bool operator==(const BarrierReply&) const = default;
};

struct PortDesc {
  uint32_t port_no = 0;
  MacAddress hw_addr;
  std::string name;
  uint32_t config = 0;
  uint32_t state = 0;
  uint32_t curr = 0;
  uint32_t advertised = 0;
  uint32_t supported = 0;
  uint32_t peer = 0;
  uint32_t curr_speed = 0;
  uint32_t max_speed = 0;
  bool operator==(const PortDesc&) const = default;
};

struct PortStatus {
  uint8_t reason = 0;
  PortDesc desc;
  bool operator==(const PortStatus&) const = default;
};

using Body = std::variant<Hello, Error, EchoRequest, EchoReply, FeaturesRequest, FeaturesReply,
                          PacketIn, PortStatus, PacketOut, FlowMod, MultipartRequest,
                          MultipartReply, BarrierRequest, BarrierReply>;

struct Message {
  uint32_t xid = 0;
  Body body;

  MsgType type() const;
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(body);
  }
  template <typename T>
  const T& as() const {
    return std::get<T>(body);
  }
  bool operator==(const Message&) const = default;
};

}  // namespace sdx::of
