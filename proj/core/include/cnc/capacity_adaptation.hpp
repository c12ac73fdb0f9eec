#pragma once

// Frame-wise virtual-capacity iteration and the outage-time actions.

#include <cstdint>
#include <vector>

#include "cnc/control_view.hpp"
#include "cnc/virtual_controller.hpp"

namespace cnc {

struct FrameState {
  std::int64_t frame_length = 1;
  EdgeTables nu_avg;
  EdgeTables x_avg;
};

FrameState make_frame_state(const ControlView& view, std::int64_t frame_length);

// Average restarts at t = kK, otherwise incremental mean over kK..t.
void update_frame_averages(FrameState& state, const EdgeTables& nu, const EdgeTables& x, std::int64_t t);

inline bool is_frame_end(std::int64_t t, std::int64_t K) { return (t + 1) % K == 0; }

struct Reductions {
  std::vector<double> links;
  std::vector<double> nodes;
};

Reductions compute_reductions(const ControlView& view, const FrameState& state);

struct CapacityRule {
  double threshold_link = 0.0;  // packets per slot
  double threshold_node = 0.0;  // CPU units
  double floor_fraction = 0.01; // of actual capacity
};

// C(k+1) = C(k) - eps when eps exceeds the threshold, never below the floor.
void apply_capacity_update(Capacities& virtual_caps, const Capacities& actual, const Reductions& eps,
                           const CapacityRule& rule);

// Baseline rule: C(k+1) = C(k) - kappa * max(0, eps) every frame.
void apply_scaled_reduction(Capacities& virtual_caps, const Capacities& actual, const Reductions& eps, double kappa,
                            double floor_fraction);

// Virtual capacities of a post-outage network: all equal to actual.
Capacities outage_reset(const PhysicalNetwork& network);

// Carries virtual capacities of surviving resources over to a new network.
Capacities remap_capacities(const PhysicalNetwork& from, const Capacities& caps, const PhysicalNetwork& to);

// Moves frame averages onto the post-outage graphs. Average flow on failed
// transmission (processing) edges is added to the surviving transmission
// (processing) edges of the same commodity, stage and lifetime in
// proportion to their own averages, uniformly if those are all zero.
// With redistribute = false the failed share is simply dropped.
FrameState redistribute_frame_averages(const ControlView& before, const FrameState& state, const ControlView& after,
                                       bool redistribute = true);

}  // namespace cnc
