#pragma once

#include <stdexcept>
#include <variant>
#include <vector>

#include "sdx/openflow/messages.h"
#include "sdx/rules/flow_table.h"

namespace sdx::rules {

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using PlanStep = std::variant<of::FlowMod, of::BarrierRequest>;

struct FlowUpdatePlan {
  uint64_t dp_id = 0;
  std::vector<PlanStep> steps;

  bool empty() const { return steps.empty(); }
  size_t flow_mod_count() const;
  size_t barrier_count() const;
  size_t count(of::FlowModCommand command) const;
};

// DELETE_STRICT for every key absent from target, then ADD for every new or
// changed entry, then one barrier. Identical tables give an empty plan.
FlowUpdatePlan plan_update(const FlowTable& current, const FlowTable& target);

// Full install: wipe everything carrying our cookie marker, add all entries,
// barrier.
FlowUpdatePlan plan_install(const FlowTable& target);

of::FlowMod wipe_flow_mod();

}  // namespace sdx::rules
