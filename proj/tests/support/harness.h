#pragma once

#include <memory>

#include "sdx/common/clock.h"
#include "sdx/controller/controller.h"
#include "sdx/sim/fabric.h"

namespace sdx::testing {

// Controller and simulated fabric on one manual clock; every sim tick also
// ticks the controller.
struct Harness {
  std::shared_ptr<ManualClock> clock = std::make_shared<ManualClock>();
  controller::Controller ctl;
  sim::SimFabric fabric;

  Harness(config::FabricConfig cfg, sim::TopologySpec topo, controller::ControllerOptions opt = {},
          bool connect = true)
      : ctl(std::move(cfg), clock, opt), fabric(std::move(topo), clock) {
    fabric.on_tick([this](int64_t) { ctl.tick(); });
    if (connect) fabric.connect(ctl);
  }
};

}  // namespace sdx::testing
