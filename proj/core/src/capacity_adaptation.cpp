#include "cnc/capacity_adaptation.hpp"

#include <algorithm>

namespace cnc {

FrameState make_frame_state(const ControlView& view, std::int64_t frame_length) {
  if (frame_length < 1) throw ConfigError("frame length must be at least 1");
  return {frame_length, view.edge_tables(), view.edge_tables()};
}

namespace {

void running_mean(EdgeTables& avg, const EdgeTables& value, std::int64_t offset) {
  const double keep = static_cast<double>(offset);
  const double inv = 1.0 / static_cast<double>(offset + 1);
  for (std::size_t c = 0; c < avg.size(); ++c) {
    auto dst = avg[c].raw();
    auto src = value[c].raw();
    if (offset == 0) {
      std::copy(src.begin(), src.end(), dst.begin());
    } else {
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = (keep * dst[i] + src[i]) * inv;
    }
  }
}

}  // namespace

void update_frame_averages(FrameState& state, const EdgeTables& nu, const EdgeTables& x, std::int64_t t) {
  const std::int64_t offset = t % state.frame_length;
  running_mean(state.nu_avg, nu, offset);
  running_mean(state.x_avg, x, offset);
}

Reductions compute_reductions(const ControlView& view, const FrameState& state) {
  const auto& net = view.network();
  Reductions eps{std::vector<double>(net.num_links(), 0.0), std::vector<double>(net.num_nodes(), 0.0)};
  for (std::size_t c = 0; c < view.num_commodities(); ++c) {
    const auto& cv = view.commodity(c);
    const auto& g = *cv.graph;
    const auto& nu = state.nu_avg[c];
    const auto& x = state.x_avg[c];
    const std::size_t E = g.num_edges();

    std::vector<double> shortfall(E, 0.0);
    std::vector<double> nu_edge(E, 0.0);
    for (std::size_t e = 0; e < E; ++e) {
      for (int l = 1; l <= cv.max_lifetime; ++l) shortfall[e] += std::max(0.0, nu.at(e, l) - x.at(e, l));
      nu_edge[e] = nu.row_sum(e);
    }
    for (int e = 0; e < static_cast<int>(E); ++e) {
      if (!cv.edge_active(e)) continue;
      const auto& edge = g.edge(e);
      double upstream = 0.0;
      for (int in : g.in_edges(edge.tail)) upstream += shortfall[in];
      double out_total = 0.0;
      for (int out : g.out_edges(edge.tail)) out_total += nu_edge[out];
      const double ratio = out_total > 0.0 ? nu_edge[e] / out_total : 0.0;
      const double contribution = edge.rho * (shortfall[e] - upstream * ratio);
      if (edge.kind == EdgeKind::Transmission) {
        eps.links[edge.resource] += contribution;
      } else {
        eps.nodes[edge.resource] += contribution;
      }
    }
  }
  return eps;
}

void apply_capacity_update(Capacities& virtual_caps, const Capacities& actual, const Reductions& eps,
                           const CapacityRule& rule) {
  auto update = [&](std::vector<double>& cap, const std::vector<double>& act, const std::vector<double>& e,
                    double threshold) {
    for (std::size_t i = 0; i < cap.size(); ++i) {
      if (e[i] > threshold) cap[i] = std::max(cap[i] - e[i], rule.floor_fraction * act[i]);
    }
  };
  update(virtual_caps.links, actual.links, eps.links, rule.threshold_link);
  update(virtual_caps.nodes, actual.nodes, eps.nodes, rule.threshold_node);
}

void apply_scaled_reduction(Capacities& virtual_caps, const Capacities& actual, const Reductions& eps, double kappa,
                            double floor_fraction) {
  auto update = [&](std::vector<double>& cap, const std::vector<double>& act, const std::vector<double>& e) {
    for (std::size_t i = 0; i < cap.size(); ++i) {
      cap[i] = std::max(cap[i] - kappa * std::max(0.0, e[i]), floor_fraction * act[i]);
    }
  };
  update(virtual_caps.links, actual.links, eps.links);
  update(virtual_caps.nodes, actual.nodes, eps.nodes);
}

Capacities outage_reset(const PhysicalNetwork& network) { return Capacities::actual(network); }

Capacities remap_capacities(const PhysicalNetwork& from, const Capacities& caps, const PhysicalNetwork& to) {
  Capacities out = Capacities::actual(to);
  for (std::size_t k = 0; k < to.num_links(); ++k) {
    const auto& l = to.links()[k];
    if (auto old = from.link_index(l.from, l.to)) out.links[k] = caps.links[*old];
  }
  for (std::size_t i = 0; i < to.num_nodes(); ++i) {
    if (auto old = from.node_index(to.nodes()[i].id)) out.nodes[i] = caps.nodes[*old];
  }
  return out;
}

namespace {

LifetimeTable move_table(const LayeredGraph& g_old, const LifetimeTable& old_avg, const LayeredGraph& g_new,
                         int new_destination, const std::vector<int>& map, bool redistribute) {
  LifetimeTable avg = remap_rows(old_avg, map, g_new.num_edges());
  if (!redistribute) return avg;
  const int L = avg.max_lifetime();
  for (int kind = 0; kind < 2; ++kind) {
    const auto k = kind == 0 ? EdgeKind::Transmission : EdgeKind::Processing;
    for (int m = 1; m <= g_new.num_stages(); ++m) {
      if (k == EdgeKind::Processing && m == g_new.num_stages()) continue;
      std::vector<int> survivors;
      for (int e = 0; e < static_cast<int>(g_new.num_edges()); ++e) {
        const auto& edge = g_new.edge(e);
        if (edge.kind == k && edge.stage == m && edge.tail != new_destination) survivors.push_back(e);
      }
      if (survivors.empty()) continue;
      for (int l = 1; l <= L; ++l) {
        double failed = 0.0;
        for (std::size_t e = 0; e < g_old.num_edges(); ++e) {
          const auto& edge = g_old.edge(static_cast<int>(e));
          if (map[e] < 0 && edge.kind == k && edge.stage == m) failed += old_avg.at(e, l);
        }
        if (failed == 0.0) continue;
        double total = 0.0;
        for (int e : survivors) total += avg.at(e, l);
        for (int e : survivors) {
          const double share = total > 0.0 ? avg.at(e, l) / total : 1.0 / static_cast<double>(survivors.size());
          avg.at(e, l) += share * failed;
        }
      }
    }
  }
  return avg;
}

}  // namespace

FrameState redistribute_frame_averages(const ControlView& before, const FrameState& state, const ControlView& after,
                                       bool redistribute) {
  FrameState out = make_frame_state(after, state.frame_length);
  for (std::size_t c = 0; c < after.num_commodities(); ++c) {
    const auto& g_old = *before.commodity(c).graph;
    const auto& g_new = *after.commodity(c).graph;
    const int dest = after.commodity(c).destination;
    const auto map = map_layered_edges(g_old, g_new);
    out.nu_avg[c] = move_table(g_old, state.nu_avg[c], g_new, dest, map, redistribute);
    out.x_avg[c] = move_table(g_old, state.x_avg[c], g_new, dest, map, redistribute);
  }
  return out;
}

}  // namespace cnc
