#pragma once

// Lifetime-indexed actual queues: evolution, expiry, consumption at the
// destination and the mass ledger used to check conservation.

#include <span>
#include <string>
#include <vector>

#include "cnc/lifetime_table.hpp"
#include "cnc/model.hpp"

namespace cnc {

// Running per-commodity counters. *_mass fields are weighted by 1/Xi of the
// stage the packets were at, so function scaling cancels out.
struct QueueCounters {
  double arrived = 0.0;
  double delivered = 0.0;  // destination-stage packets delivered before expiry
  double expired = 0.0;
  double lost = 0.0;       // backlog dropped at failed nodes

  double arrived_mass = 0.0;
  double delivered_mass = 0.0;
  double expired_mass = 0.0;
  double lost_mass = 0.0;
};

struct SlotOutcome {
  double delivered = 0.0;
  double expired = 0.0;
};

// How incoming flow enters the next-slot backlog. Scaled multiplies by zeta
// (one input packet to a function yields zeta output packets); Unscaled
// keeps the raw flow, which breaks conservation across functions and exists
// only for A/B comparison.
enum class InflowScaling { Scaled, Unscaled };

struct QueueContext {
  const LayeredGraph* graph = nullptr;
  const ServiceChain* service = nullptr;
  int destination = -1;  // layered index of the destination copy on the last layer
  InflowScaling inflow = InflowScaling::Scaled;
};

// Q(t+1) from Q(t), flows x(t) and arrivals a(t+1) (all indexed by layered
// node / edge and lifetime). Throws SimulationError if x overdraws a queue
// by more than `tolerance` (relative to the backlog).
SlotOutcome advance_queues(const QueueContext& ctx, LifetimeTable& queues, const LifetimeTable& flows,
                           const LifetimeTable& next_arrivals, QueueCounters& counters,
                           double tolerance = 1e-9);

// Destination-stage packets entering the destination copy in this slot.
double timely_delivery(const LayeredGraph& graph, int destination, const LifetimeTable& flows);

// Mass-weighted backlog currently in the network.
double backlog_mass(const LayeredGraph& graph, const ServiceChain& service, const LifetimeTable& queues);

struct ConservationLedger {
  double arrived = 0.0;
  double delivered = 0.0;
  double expired = 0.0;
  double lost = 0.0;
  double in_network = 0.0;
  double residual = 0.0;

  double relative_residual() const;
};

ConservationLedger conservation_report(const QueueCounters& counters, const LayeredGraph& graph,
                                       const ServiceChain& service, const LifetimeTable& queues);

// Cost h(t) = sum e * rho * x over a commodity's edges.
double flow_cost(const LayeredGraph& graph, const LifetimeTable& flows);

}  // namespace cnc
