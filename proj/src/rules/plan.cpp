#include "sdx/rules/plan.h"

#include <algorithm>

#include "sdx/config/emit.h"

namespace sdx::rules {

size_t FlowUpdatePlan::flow_mod_count() const {
  return static_cast<size_t>(std::count_if(steps.begin(), steps.end(), [](const PlanStep& s) {
    return std::holds_alternative<of::FlowMod>(s);
  }));
}

size_t FlowUpdatePlan::barrier_count() const { return steps.size() - flow_mod_count(); }

size_t FlowUpdatePlan::count(of::FlowModCommand command) const {
  return static_cast<size_t>(std::count_if(steps.begin(), steps.end(), [&](const PlanStep& s) {
    const auto* fm = std::get_if<of::FlowMod>(&s);
    return fm != nullptr && fm->command == command;
  }));
}

namespace {

const FlowEntry* find_key(const std::vector<FlowEntry>& entries, const FlowEntry& key) {
  auto it = std::find_if(entries.begin(), entries.end(),
                         [&](const FlowEntry& e) { return e.same_key(key); });
  return it == entries.end() ? nullptr : &*it;
}

}  // namespace

FlowUpdatePlan plan_update(const FlowTable& current, const FlowTable& target) {
  if (current.dp_id != target.dp_id) {
    throw PlanError("dp_id mismatch: " + config::format_hex(current.dp_id) + " vs " +
                    config::format_hex(target.dp_id));
  }
  FlowUpdatePlan plan;
  plan.dp_id = target.dp_id;
  for (const auto& e : current.entries) {
    if (find_key(target.entries, e) == nullptr) {
      plan.steps.emplace_back(to_flow_mod(e, of::FlowModCommand::kDeleteStrict));
    }
  }
  for (const auto& e : target.entries) {
    const auto* old = find_key(current.entries, e);
    if (old == nullptr || !(*old == e)) {
      plan.steps.emplace_back(to_flow_mod(e, of::FlowModCommand::kAdd));
    }
  }
  if (!plan.steps.empty()) plan.steps.emplace_back(of::BarrierRequest{});
  return plan;
}

of::FlowMod wipe_flow_mod() {
  of::FlowMod fm;
  fm.command = of::FlowModCommand::kDelete;
  fm.table_id = of::kAllTables;
  fm.cookie = kCookieMarker << 56;
  fm.cookie_mask = kCookieMarkerMask;
  return fm;
}

FlowUpdatePlan plan_install(const FlowTable& target) {
  FlowUpdatePlan plan;
  plan.dp_id = target.dp_id;
  plan.steps.emplace_back(wipe_flow_mod());
  for (const auto& e : target.entries) {
    plan.steps.emplace_back(to_flow_mod(e, of::FlowModCommand::kAdd));
  }
  plan.steps.emplace_back(of::BarrierRequest{});
  return plan;
}

}  // namespace sdx::rules
