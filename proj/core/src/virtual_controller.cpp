#include "cnc/virtual_controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace cnc {

double VirtualQueueState::total() const {
  double s = 0.0;
  for (double u : reliability) s += u;
  for (const auto& t : causality) s += t.total();
  return s;
}

VirtualQueueState make_virtual_queues(const ControlView& view) {
  return {std::vector<double>(view.num_commodities(), 0.0), view.node_tables()};
}

void update_virtual_queues(const ControlView& view, VirtualQueueState& U, const EdgeTables& nu,
                           const NodeTables& arrivals) {
  for (std::size_t c = 0; c < view.num_commodities(); ++c) {
    const auto& cv = view.commodity(c);
    const auto& g = *cv.graph;
    const int L = cv.max_lifetime;
    const auto& flow = nu[c];

    double delivered = 0.0;
    for (int e : g.in_edges(cv.destination)) delivered += g.edge(e).zeta * flow.row_sum(e);
    const double demand = cv.final_scaling * cv.commodity->gamma_long * arrivals[c].total();
    U.reliability[c] = std::max(0.0, U.reliability[c] - delivered + demand);

    auto& table = U.causality[c];
    std::vector<double> a_ge(L + 2), out_ge(L + 2), in_ge(L + 2);
    for (int v = 0; v < static_cast<int>(g.num_nodes()); ++v) {
      if (v == cv.destination) continue;
      std::fill(a_ge.begin(), a_ge.end(), 0.0);
      std::fill(out_ge.begin(), out_ge.end(), 0.0);
      std::fill(in_ge.begin(), in_ge.end(), 0.0);
      for (int l = L; l >= 1; --l) {
        double out = 0.0;
        for (int e : g.out_edges(v)) out += flow.at(e, l);
        double in = 0.0;
        for (int e : g.in_edges(v)) in += g.edge(e).zeta * flow.at(e, l);
        a_ge[l] = a_ge[l + 1] + arrivals[c].at(v, l);
        out_ge[l] = out_ge[l + 1] + out;
        in_ge[l] = in_ge[l + 1] + in;
      }
      for (int l = 1; l <= L; ++l) {
        double& u = table.at(v, l);
        u = std::max(0.0, u - a_ge[l] + out_ge[l] - in_ge[l + 1]);
      }
    }
  }
}

Capacities Capacities::actual(const PhysicalNetwork& network) {
  Capacities caps;
  for (const auto& l : network.links()) caps.links.push_back(l.capacity);
  for (const auto& n : network.nodes()) caps.nodes.push_back(n.capacity);
  return caps;
}

PenaltyConfig choose_V(const ControlView& view, double v_raw) {
  PenaltyConfig p;
  p.v_raw = v_raw;
  double c_sum = 0.0;
  double e_sum = 0.0;
  std::size_t count = 0;
  const auto& net = view.network();
  for (const auto& cv : view.commodities()) {
    for (std::size_t e = 0; e < cv.graph->num_edges(); ++e) {
      const auto& edge = cv.graph->edge(static_cast<int>(e));
      const double cap = edge.kind == EdgeKind::Transmission ? net.links()[edge.resource].capacity
                                                             : net.nodes()[edge.resource].capacity;
      c_sum += cap / edge.rho;
      e_sum += edge.cost * edge.rho / cv.beta[edge.tail];
      ++count;
    }
  }
  if (count == 0) return p;
  p.c_avg = c_sum / static_cast<double>(count);
  p.e_avg = e_sum / static_cast<double>(count);
  p.v = p.e_avg > 0.0 ? v_raw * p.c_avg / p.e_avg : 0.0;
  return p;
}

EdgeTables compute_weights(const ControlView& view, const VirtualQueueState& U, double V) {
  EdgeTables weights = view.edge_tables();
  for (std::size_t c = 0; c < view.num_commodities(); ++c) {
    const auto& cv = view.commodity(c);
    const auto& g = *cv.graph;
    const int L = cv.max_lifetime;
    const auto& u = U.causality[c];

    // prefix[v][l] = U_v^{<= l}, with prefix[v][0] = 0.
    LifetimeTable prefix(g.num_nodes(), L);
    for (std::size_t v = 0; v < g.num_nodes(); ++v) {
      double acc = 0.0;
      for (int l = 1; l <= L; ++l) {
        acc += u.at(v, l);
        prefix.at(v, l) = acc;
      }
    }

    auto& w = weights[c];
    for (int e = 0; e < static_cast<int>(g.num_edges()); ++e) {
      if (!cv.edge_active(e)) {
        for (int l = 1; l <= L; ++l) w.at(e, l) = -std::numeric_limits<double>::infinity();
        continue;
      }
      const auto& edge = g.edge(e);
      const double cost_term = -V * edge.cost;
      const double tail_coef = cv.beta[edge.tail] / edge.rho;
      const double head_coef = edge.zeta * cv.beta[edge.head] / edge.rho;
      for (int l = 1; l <= L; ++l) {
        const double head_backlog =
            edge.head == cv.destination ? U.reliability[c] : prefix.at(edge.head, l - 1);
        w.at(e, l) = cost_term - tail_coef * prefix.at(edge.tail, l) + head_coef * head_backlog;
      }
    }
  }
  return weights;
}

std::optional<std::size_t> select_max_weight(std::span<const MaxWeightCandidate> candidates) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (!(c.weight > 0.0)) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = candidates[*best];
    if (c.weight > b.weight ||
        (c.weight == b.weight &&
         std::tie(c.commodity, c.lifetime, c.stage) < std::tie(b.commodity, b.lifetime, b.stage))) {
      best = i;
    }
  }
  return best;
}

namespace {

void assign_resource(const ControlView& view, std::span<const ResourceUse> uses, const EdgeTables& weights,
                     double capacity, bool processing, EdgeTables& nu,
                     std::vector<MaxWeightCandidate>& scratch, std::vector<ResourceUse>& owners) {
  scratch.clear();
  owners.clear();
  for (const auto& use : uses) {
    const auto& cv = view.commodity(use.commodity);
    const int stage = cv.graph->edge(use.edge).stage;
    for (int l = 1; l <= cv.max_lifetime; ++l) {
      scratch.push_back({use.commodity, l, stage, weights[use.commodity].at(use.edge, l)});
      owners.push_back(use);
    }
  }
  const auto win = select_max_weight(scratch);
  if (!win) return;
  const auto& owner = owners[*win];
  const auto& edge = view.commodity(owner.commodity).graph->edge(owner.edge);
  nu[owner.commodity].at(owner.edge, scratch[*win].lifetime) = processing ? capacity / edge.rho : capacity;
}

}  // namespace

EdgeTables max_weight_assign(const ControlView& view, const EdgeTables& weights, const Capacities& virtual_caps) {
  EdgeTables nu = view.edge_tables();
  std::vector<MaxWeightCandidate> scratch;
  std::vector<ResourceUse> owners;
  const auto& net = view.network();
  for (std::size_t k = 0; k < net.num_links(); ++k) {
    assign_resource(view, view.link_uses(k), weights, virtual_caps.links[k], false, nu, scratch, owners);
  }
  for (std::size_t i = 0; i < net.num_nodes(); ++i) {
    assign_resource(view, view.node_uses(i), weights, virtual_caps.nodes[i], true, nu, scratch, owners);
  }
  return nu;
}

}  // namespace cnc
