#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdx/openflow/messages.h"

namespace sdx::sim {

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SwitchSpec {
  std::string name;
  uint64_t dp_id = 0;
  uint32_t ports = 0;
};

struct HostSpec {
  std::string name;
  std::string switch_name;
  uint32_t port = 0;
  of::MacAddress mac;
  std::string vlan;
};

struct FlowSpec {
  std::string name;
  std::string src;
  std::string dst;
  uint64_t pps = 0;
  uint32_t bytes = 0;
  uint16_t eth_type = 0x0800;
  std::optional<uint8_t> ip_proto;
  int64_t start_ms = 0;
  std::optional<int64_t> stop_ms;
};

struct TopologySpec {
  std::vector<SwitchSpec> switches;
  std::vector<HostSpec> hosts;
  std::vector<FlowSpec> flows;

  const SwitchSpec* find_switch(std::string_view name) const;
  const HostSpec* find_host(std::string_view name) const;
};

constexpr uint32_t kMinFrameBytes = 64;
constexpr uint32_t kMaxFrameBytes = 9000;

// Checks names, attachments, dp_id uniqueness, pps and frame sizes; throws
// TopologyError.
void validate_topology(const TopologySpec& spec);
void validate_flow(const TopologySpec& spec, const FlowSpec& flow);

// Parses and validates the YAML form. Host MACs default to 0e:00:00:00:00:NN
// by declaration order.
TopologySpec parse_topology(const std::string& yaml_text);
TopologySpec load_topology_file(const std::string& path);

// The stock shapes: n ASes (1..4) on sw1 ports 1..n of a 4-port switch,
// dp_id 0x1, all in VLAN office.
TopologySpec star_topology(int n_hosts, uint32_t n_ports = 4);

}  // namespace sdx::sim
