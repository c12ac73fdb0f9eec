#pragma once

// Flow matching: request queues and the n-slot look-ahead LP that turns the
// virtual flow into an admissible actual flow.

#include <string>
#include <vector>

#include "cnc/control_view.hpp"
#include "cnc/lp.hpp"
#include "cnc/virtual_controller.hpp"

namespace cnc {

// R(t+1) = R(t) + nu(t) - x(t), signed.
void update_request_queues(EdgeTables& R, const EdgeTables& nu, const EdgeTables& x);

// Delayed column sum  sum_{s=1..tau} D^{tau-s+1} X[:, s]  where D shifts
// lifetimes down by one. columns[s][l-1] holds lifetime l of column s+1.
std::vector<double> g_tau(const std::vector<std::vector<double>>& columns, int tau);

struct FlowVariable {
  int commodity = 0;
  int edge = 0;
  int lifetime = 1;
  int slot = 0;
};

struct FlowMatchingInput {
  const ControlView* view = nullptr;
  const EdgeTables* requests = nullptr;          // R(t)
  const NodeTables* queues = nullptr;            // Q(t)
  const NodeTables* arrival_estimate = nullptr;  // fading-average arrivals
  const Capacities* capacities = nullptr;        // actual capacities
  int lookahead = 1;
};

struct FlowMatchingLp {
  LinearProgram lp;
  std::vector<FlowVariable> variables;
  std::vector<std::string> row_labels;  // filled only when requested
  int lookahead = 1;
};

// Variables are created only where they can carry packets (backlog or
// reachable arrivals at the tail for that slot) and can matter (positive
// request, or feeding such a variable downstream in a later slot).
// Availability is written per packet cohort: everything a node sends from a
// cohort up to slot tau is bounded by its initial backlog plus scaled inflow
// and estimated arrivals received before tau.
FlowMatchingLp build_flow_matching_lp(const FlowMatchingInput& input, bool with_labels = false);

struct FlowPlan {
  std::vector<EdgeTables> slots;  // planned flow per look-ahead slot
  double objective = 0.0;
  std::int64_t iterations = 0;
};

// Throws SimulationError when the solver does not reach optimality or the
// solution violates the LP by more than `tolerance`.
FlowPlan solve_flow_matching(const ControlView& view, const FlowMatchingLp& problem, LpSolver& solver,
                             double tolerance = 1e-7);

// First look-ahead column.
EdgeTables extract_decision(const FlowPlan& plan);

std::vector<std::string> variable_labels(const ControlView& view, const FlowMatchingLp& problem);

struct AdmissibilityReport {
  double worst_negative = 0.0;      // most negative entry (absolute)
  double worst_availability = 0.0;  // relative overdraw of a queue
  double worst_capacity = 0.0;      // relative overuse of a resource
  std::size_t violations = 0;       // entries above the tolerance
};

AdmissibilityReport check_admissibility(const ControlView& view, const EdgeTables& x, const NodeTables& queues,
                                        const Capacities& capacities, double tolerance = 1e-9);

// Removes round-off: clamps negatives and scales flows down proportionally
// where a queue or resource is exceeded by at most `tolerance` (relative).
// Anything larger is a controller bug and throws SimulationError.
void repair_decision(const ControlView& view, EdgeTables& x, const NodeTables& queues, const Capacities& capacities,
                     double tolerance = 1e-7);

}  // namespace cnc
