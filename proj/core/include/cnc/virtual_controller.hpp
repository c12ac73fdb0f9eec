#pragma once

// Relaxed control plane: reliability and causality virtual queues,
// drift-plus-penalty weights and the max-weight virtual flow.

#include <optional>
#include <span>
#include <vector>

#include "cnc/control_view.hpp"

namespace cnc {

struct VirtualQueueState {
  std::vector<double> reliability;  // U_d per commodity
  NodeTables causality;             // U per (layered node, lifetime); destination row unused

  double total() const;
};

VirtualQueueState make_virtual_queues(const ControlView& view);

// nu: virtual flow of slot t; arrivals: a(t) at layered nodes.
void update_virtual_queues(const ControlView& view, VirtualQueueState& U, const EdgeTables& nu,
                           const NodeTables& arrivals);

struct PenaltyConfig {
  double v_raw = 0.0;
  double c_avg = 0.0;
  double e_avg = 0.0;
  double v = 0.0;
};

// Capacities are indexed like the view's network.
struct Capacities {
  std::vector<double> links;
  std::vector<double> nodes;

  static Capacities actual(const PhysicalNetwork& network);
};

PenaltyConfig choose_V(const ControlView& view, double v_raw);

// Weight per (commodity, layered edge, lifetime). Inactive edges (leaving
// the destination) get -infinity.
EdgeTables compute_weights(const ControlView& view, const VirtualQueueState& U, double V);

struct MaxWeightCandidate {
  int commodity = 0;
  int lifetime = 1;
  int stage = 1;
  double weight = 0.0;
};

// Index of the winning candidate: largest strictly positive weight, ties to
// the lowest commodity, then lifetime, then stage.
std::optional<std::size_t> select_max_weight(std::span<const MaxWeightCandidate> candidates);

EdgeTables max_weight_assign(const ControlView& view, const EdgeTables& weights, const Capacities& virtual_caps);

}  // namespace cnc
