#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdx/openflow/messages.h"
#include "sdx/rules/flow_table.h"

namespace sdx::sim {

// Header tuple of a metadata-only frame.
struct FrameHeader {
  of::MacAddress src;
  of::MacAddress dst;
  uint16_t eth_type = 0;
  std::optional<uint8_t> ip_proto;
  bool operator==(const FrameHeader&) const = default;
};

bool match_applies(const of::Match& m, uint32_t in_port, const FrameHeader& h);

struct InstalledFlow {
  uint8_t table_id = 0;
  uint16_t priority = 0;
  of::Match match;
  std::vector<of::Instruction> instructions;
  uint64_t cookie = 0;
  uint16_t idle_timeout = 0;
  uint16_t hard_timeout = 0;
  uint64_t seq = 0;
  int64_t installed_ms = 0;
  int64_t last_used_ms = 0;
  uint64_t packet_count = 0;
  uint64_t byte_count = 0;
};

struct FlowModOutcome {
  bool ok = true;
  uint16_t error_type = 0;
  uint16_t error_code = 0;
  size_t added = 0;
  size_t modified = 0;
  size_t removed = 0;
};

// OpenFlow 1.3 flow-table semantics for a small fixed pipeline.
class SimFlowTables {
 public:
  explicit SimFlowTables(uint8_t n_tables = rules::kNumTables) : n_tables_(n_tables) {}

  FlowModOutcome apply(const of::FlowMod& fm, int64_t now_ms);

  // Highest priority wins; ties go to the earliest inserted entry.
  InstalledFlow* lookup(uint8_t table_id, uint32_t in_port, const FrameHeader& h);

  void record_hit(uint64_t seq, uint64_t packets, uint64_t bytes, int64_t now_ms);

  // Removes entries whose idle or hard timeout elapsed; returns how many.
  size_t expire(int64_t now_ms);

  const std::vector<InstalledFlow>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  uint8_t n_tables() const { return n_tables_; }

  // Structural view comparable with compile_datapath output. Learned L2
  // entries are included unless skip_learned is set.
  rules::FlowTable snapshot(uint64_t dp_id, bool skip_learned = false) const;

 private:
  uint8_t n_tables_;
  uint64_t next_seq_ = 0;
  std::vector<InstalledFlow> entries_;
};

}  // namespace sdx::sim
