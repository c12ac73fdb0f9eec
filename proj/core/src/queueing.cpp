#include "cnc/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cnc {

namespace {

std::vector<double> stage_betas(const LayeredGraph& graph, const ServiceChain& service) {
  std::vector<double> beta(static_cast<std::size_t>(graph.num_stages()) + 1, 1.0);
  for (int m = 1; m <= graph.num_stages(); ++m) beta[m] = 1.0 / cumulative_scaling(service, m);
  return beta;
}

}  // namespace

SlotOutcome advance_queues(const QueueContext& ctx, LifetimeTable& queues, const LifetimeTable& flows,
                           const LifetimeTable& next_arrivals, QueueCounters& counters, double tolerance) {
  const LayeredGraph& g = *ctx.graph;
  const int L = queues.max_lifetime();
  const auto beta = stage_betas(g, *ctx.service);
  SlotOutcome outcome;

  LifetimeTable next(g.num_nodes(), L);
  std::vector<double> remaining(static_cast<std::size_t>(L) + 2, 0.0);
  std::vector<double> inflow(static_cast<std::size_t>(L) + 2, 0.0);

  for (int v = 0; v < static_cast<int>(g.num_nodes()); ++v) {
    std::fill(remaining.begin(), remaining.end(), 0.0);
    std::fill(inflow.begin(), inflow.end(), 0.0);
    for (int l = 1; l <= L; ++l) {
      double out = 0.0;
      for (int e : g.out_edges(v)) {
        const double f = flows.at(e, l);
        if (f < -tolerance * std::max(1.0, std::abs(f))) {
          throw SimulationError("negative flow on layered edge " + std::to_string(e));
        }
        out += f;
      }
      double rem = queues.at(v, l) - out;
      if (rem < 0.0) {
        if (-rem > tolerance * std::max(1.0, queues.at(v, l))) {
          std::ostringstream msg;
          msg << "availability violated at layered node " << v << " lifetime " << l << ": backlog "
              << queues.at(v, l) << " < outflow " << out;
          throw SimulationError(msg.str());
        }
        rem = 0.0;
      }
      remaining[l] = rem;
    }
    for (int e : g.in_edges(v)) {
      const auto& edge = g.edge(e);
      const double scale = ctx.inflow == InflowScaling::Scaled ? edge.zeta : 1.0;
      for (int l = 1; l <= L; ++l) inflow[l] += scale * flows.at(e, l);
    }

    const double b = beta[g.node(v).stage];
    if (v == ctx.destination) {
      double delivered = 0.0;
      for (int l = 1; l <= L; ++l) delivered += inflow[l];
      outcome.delivered += delivered;
      counters.delivered += delivered;
      counters.delivered_mass += delivered * b;
      // Anything left at the destination copy is consumed as well.
      double stranded = 0.0;
      for (int l = 1; l <= L; ++l) stranded += remaining[l];
      counters.delivered += stranded;
      counters.delivered_mass += stranded * b;
    } else {
      const double dead = remaining[1] + inflow[1];
      outcome.expired += dead;
      counters.expired += dead;
      counters.expired_mass += dead * b;
      for (int l = 1; l < L; ++l) next.at(v, l) = remaining[l + 1] + inflow[l + 1];
    }
    for (int l = 1; l <= L; ++l) {
      const double a = next_arrivals.at(v, l);
      if (a == 0.0) continue;
      next.at(v, l) += a;
      counters.arrived += a;
      counters.arrived_mass += a * b;
    }
  }
  queues = std::move(next);
  return outcome;
}

double timely_delivery(const LayeredGraph& graph, int destination, const LifetimeTable& flows) {
  double total = 0.0;
  for (int e : graph.in_edges(destination)) {
    const double zeta = graph.edge(e).zeta;
    for (int l = 1; l <= flows.max_lifetime(); ++l) total += zeta * flows.at(e, l);
  }
  return total;
}

double backlog_mass(const LayeredGraph& graph, const ServiceChain& service, const LifetimeTable& queues) {
  const auto beta = stage_betas(graph, service);
  double mass = 0.0;
  for (std::size_t v = 0; v < graph.num_nodes(); ++v) {
    mass += queues.row_sum(v) * beta[graph.node(static_cast<int>(v)).stage];
  }
  return mass;
}

double ConservationLedger::relative_residual() const {
  const double scale = std::max({arrived, delivered + expired + lost + in_network, 1.0});
  return std::abs(residual) / scale;
}

ConservationLedger conservation_report(const QueueCounters& counters, const LayeredGraph& graph,
                                       const ServiceChain& service, const LifetimeTable& queues) {
  ConservationLedger ledger;
  ledger.arrived = counters.arrived_mass;
  ledger.delivered = counters.delivered_mass;
  ledger.expired = counters.expired_mass;
  ledger.lost = counters.lost_mass;
  ledger.in_network = backlog_mass(graph, service, queues);
  ledger.residual = ledger.arrived - ledger.delivered - ledger.expired - ledger.lost - ledger.in_network;
  return ledger;
}

double flow_cost(const LayeredGraph& graph, const LifetimeTable& flows) {
  double cost = 0.0;
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    const auto& edge = graph.edge(static_cast<int>(e));
    const double per_unit = edge.cost * edge.rho;
    if (per_unit == 0.0) continue;
    cost += per_unit * flows.row_sum(e);
  }
  return cost;
}

}  // namespace cnc
