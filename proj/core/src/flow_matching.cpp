#include "cnc/flow_matching.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cnc {

void update_request_queues(EdgeTables& R, const EdgeTables& nu, const EdgeTables& x) {
  for (std::size_t c = 0; c < R.size(); ++c) {
    auto r = R[c].raw();
    auto v = nu[c].raw();
    auto f = x[c].raw();
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += v[i] - f[i];
  }
}

std::vector<double> g_tau(const std::vector<std::vector<double>>& columns, int tau) {
  if (tau < 0 || static_cast<std::size_t>(tau) > columns.size()) {
    throw std::invalid_argument("g_tau: tau exceeds the column count");
  }
  const std::size_t L = columns.empty() ? 0 : columns.front().size();
  std::vector<double> out(L, 0.0);
  for (int s = 1; s <= tau; ++s) {
    const auto& col = columns[s - 1];
    const std::size_t shift = static_cast<std::size_t>(tau - s + 1);
    for (std::size_t l = 0; l + shift < L; ++l) out[l] += col[l + shift];
  }
  return out;
}

namespace {

// Index of (edge, lifetime) in a flat per-(commodity, slot) array.
struct VarIndex {
  std::size_t width = 0;
  std::vector<int> ids;
  int get(int e, int l) const { return ids[static_cast<std::size_t>(e) * width + static_cast<std::size_t>(l)]; }
  int& at(int e, int l) { return ids[static_cast<std::size_t>(e) * width + static_cast<std::size_t>(l)]; }
};

std::string node_label(const LayeredGraph& g, int v) {
  const auto& k = g.node(v);
  return std::to_string(k.node) + "_" + std::to_string(k.stage);
}

}  // namespace

FlowMatchingLp build_flow_matching_lp(const FlowMatchingInput& in, bool with_labels) {
  if (in.lookahead < 1) throw std::invalid_argument("flow matching: look-ahead must be at least 1");
  const ControlView& view = *in.view;
  const int n = in.lookahead;
  const std::size_t C = view.num_commodities();
  if (in.requests->size() != C || in.queues->size() != C || in.arrival_estimate->size() != C) {
    throw std::invalid_argument("flow matching: per-commodity tables do not match the view");
  }

  FlowMatchingLp out;
  out.lookahead = n;
  // index[c][s]
  std::vector<std::vector<VarIndex>> index(C, std::vector<VarIndex>(static_cast<std::size_t>(n)));

  for (std::size_t c = 0; c < C; ++c) {
    const auto& cv = view.commodity(c);
    const auto& g = *cv.graph;
    const int L = cv.max_lifetime;
    const std::size_t E = g.num_edges();
    const std::size_t V = g.num_nodes();
    const auto& R = (*in.requests)[c];
    const auto& Q = (*in.queues)[c];
    const auto& abar = (*in.arrival_estimate)[c];
    const std::size_t W = static_cast<std::size_t>(L) + 1;

    // useful[s][e*W + l]
    std::vector<std::vector<char>> useful(n, std::vector<char>(E * W, 0));
    for (int s = n - 1; s >= 0; --s) {
      for (std::size_t e = 0; e < E; ++e) {
        if (!cv.edge_active(static_cast<int>(e))) continue;
        const auto& edge = g.edge(static_cast<int>(e));
        for (int l = 1; l <= L; ++l) {
          bool u = R.at(e, l) > 0.0;
          if (!u && s + 1 < n && l >= 2 && edge.head != cv.destination) {
            for (int e2 : g.out_edges(edge.head)) {
              if (useful[s + 1][static_cast<std::size_t>(e2) * W + l - 1]) {
                u = true;
                break;
              }
            }
          }
          useful[s][e * W + l] = u;
        }
      }
    }

    // avail[v*W + l]: cohort at node v with lifetime l in the current slot may be non-empty.
    std::vector<char> avail(V * W, 0);
    for (std::size_t v = 0; v < V; ++v) {
      for (int l = 1; l <= L; ++l) avail[v * W + l] = Q.at(v, l) > 0.0;
    }
    for (int s = 0; s < n; ++s) {
      auto& idx = index[c][s];
      idx.width = W;
      idx.ids.assign(E * W, -1);
      std::vector<char> next(V * W, 0);
      for (std::size_t e = 0; e < E; ++e) {
        const auto& edge = g.edge(static_cast<int>(e));
        for (int l = 1; l <= L; ++l) {
          if (!useful[s][e * W + l] || !avail[static_cast<std::size_t>(edge.tail) * W + l]) continue;
          idx.at(static_cast<int>(e), l) = out.lp.add_variable(R.at(e, l));
          out.variables.push_back({static_cast<int>(c), static_cast<int>(e), l, s});
          if (l >= 2) next[static_cast<std::size_t>(edge.head) * W + l - 1] = 1;
        }
      }
      for (std::size_t v = 0; v < V; ++v) {
        for (int l = 1; l < L; ++l) {
          if (avail[v * W + l + 1]) next[v * W + l] = 1;
        }
        for (int l = 1; l <= L; ++l) {
          if (abar.at(v, l) > 0.0) next[v * W + l] = 1;
        }
      }
      avail.swap(next);
    }
  }

  auto label = [&](std::string s) {
    if (with_labels) out.row_labels.push_back(std::move(s));
  };

  // Shared capacities, per look-ahead slot.
  const auto& net = view.network();
  for (int s = 0; s < n; ++s) {
    for (std::size_t k = 0; k < net.num_links(); ++k) {
      int row = -1;
      for (const auto& use : view.link_uses(k)) {
        const auto& idx = index[use.commodity][s];
        for (int l = 1; l <= view.commodity(use.commodity).max_lifetime; ++l) {
          const int var = idx.get(use.edge, l);
          if (var < 0) continue;
          if (row < 0) {
            row = out.lp.add_row(in.capacities->links[k]);
            label("link_" + std::to_string(net.links()[k].from) + "_" + std::to_string(net.links()[k].to) +
                  "_s" + std::to_string(s));
          }
          out.lp.add_coefficient(row, var, 1.0);
        }
      }
    }
    for (std::size_t i = 0; i < net.num_nodes(); ++i) {
      int row = -1;
      for (const auto& use : view.node_uses(i)) {
        const auto& cv = view.commodity(use.commodity);
        const double rho = cv.graph->edge(use.edge).rho;
        const auto& idx = index[use.commodity][s];
        for (int l = 1; l <= cv.max_lifetime; ++l) {
          const int var = idx.get(use.edge, l);
          if (var < 0) continue;
          if (row < 0) {
            row = out.lp.add_row(in.capacities->nodes[i]);
            label("node_" + std::to_string(net.nodes()[i].id) + "_s" + std::to_string(s));
          }
          out.lp.add_coefficient(row, var, rho);
        }
      }
    }
  }

  // Cohort availability.
  for (std::size_t c = 0; c < C; ++c) {
    const auto& cv = view.commodity(c);
    const auto& g = *cv.graph;
    const int L = cv.max_lifetime;
    const auto& Q = (*in.queues)[c];
    const auto& abar = (*in.arrival_estimate)[c];
    for (int v = 0; v < static_cast<int>(g.num_nodes()); ++v) {
      if (v == cv.destination) continue;
      for (int K = 1; K <= L + n - 1; ++K) {
        for (int tau = 0; tau < n; ++tau) {
          const int lt = K - tau;
          if (lt < 1 || lt > L) continue;
          bool has_out = false;
          for (int e : g.out_edges(v)) {
            if (index[c][tau].get(e, lt) >= 0) {
              has_out = true;
              break;
            }
          }
          if (!has_out) continue;
          double rhs = K <= L ? Q.at(v, K) : 0.0;
          for (int s = 1; s <= tau; ++s) {
            const int l = K - s;
            if (l >= 1 && l <= L) rhs += abar.at(v, l);
          }
          const int row = out.lp.add_row(rhs);
          label("avail_c" + std::to_string(c) + "_" + node_label(g, v) + "_K" + std::to_string(K) + "_t" +
                std::to_string(tau));
          for (int s = 0; s <= tau; ++s) {
            const int l = K - s;
            if (l < 1 || l > L) continue;
            for (int e : g.out_edges(v)) {
              const int var = index[c][s].get(e, l);
              if (var >= 0) out.lp.add_coefficient(row, var, 1.0);
            }
            if (s == tau) continue;
            for (int e : g.in_edges(v)) {
              const int var = index[c][s].get(e, l);
              if (var >= 0) out.lp.add_coefficient(row, var, -g.edge(e).zeta);
            }
          }
        }
      }
    }
  }
  return out;
}

FlowPlan solve_flow_matching(const ControlView& view, const FlowMatchingLp& problem, LpSolver& solver,
                             double tolerance) {
  FlowPlan plan;
  plan.slots.assign(static_cast<std::size_t>(problem.lookahead), view.edge_tables());
  if (problem.variables.empty()) return plan;
  const auto sol = solver.solve(problem.lp);
  if (sol.status != LpStatus::Optimal) {
    throw SimulationError(sol.status == LpStatus::Unbounded ? "flow-matching LP reported unbounded"
                                                            : "flow-matching LP hit the iteration limit");
  }
  const double viol = problem.lp.max_violation(sol.x);
  if (viol > tolerance) {
    std::ostringstream msg;
    msg << "flow-matching LP solution violates constraints by " << viol;
    throw SimulationError(msg.str());
  }
  for (std::size_t j = 0; j < problem.variables.size(); ++j) {
    const auto& v = problem.variables[j];
    plan.slots[v.slot][v.commodity].at(v.edge, v.lifetime) = sol.x[j];
  }
  plan.objective = sol.objective;
  plan.iterations = sol.iterations;
  return plan;
}

EdgeTables extract_decision(const FlowPlan& plan) { return plan.slots.front(); }

std::vector<std::string> variable_labels(const ControlView& view, const FlowMatchingLp& problem) {
  std::vector<std::string> names;
  names.reserve(problem.variables.size());
  for (const auto& v : problem.variables) {
    const auto& g = *view.commodity(v.commodity).graph;
    const auto& e = g.edge(v.edge);
    names.push_back("x_c" + std::to_string(v.commodity) + "_" + node_label(g, e.tail) + "_" + node_label(g, e.head) +
                    "_l" + std::to_string(v.lifetime) + "_s" + std::to_string(v.slot));
  }
  return names;
}

namespace {

template <typename Visit>
void for_each_resource(const ControlView& view, const Capacities& caps, Visit&& visit) {
  const auto& net = view.network();
  for (std::size_t k = 0; k < net.num_links(); ++k) visit(view.link_uses(k), caps.links[k], false);
  for (std::size_t i = 0; i < net.num_nodes(); ++i) visit(view.node_uses(i), caps.nodes[i], true);
}

double resource_load(const ControlView& view, std::span<const ResourceUse> uses, const EdgeTables& x,
                     bool processing) {
  double load = 0.0;
  for (const auto& u : uses) {
    const double rho = processing ? view.commodity(u.commodity).graph->edge(u.edge).rho : 1.0;
    load += rho * x[u.commodity].row_sum(u.edge);
  }
  return load;
}

}  // namespace

AdmissibilityReport check_admissibility(const ControlView& view, const EdgeTables& x, const NodeTables& queues,
                                        const Capacities& capacities, double tolerance) {
  AdmissibilityReport rep;
  for (std::size_t c = 0; c < view.num_commodities(); ++c) {
    const auto& cv = view.commodity(c);
    const auto& g = *cv.graph;
    for (double v : x[c].raw()) {
      if (v < 0.0) {
        rep.worst_negative = std::max(rep.worst_negative, -v);
        if (-v > tolerance) ++rep.violations;
      }
    }
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      if (!cv.edge_active(static_cast<int>(e)) && x[c].row_sum(e) != 0.0) ++rep.violations;
    }
    for (int v = 0; v < static_cast<int>(g.num_nodes()); ++v) {
      for (int l = 1; l <= cv.max_lifetime; ++l) {
        double out = 0.0;
        for (int e : g.out_edges(v)) out += x[c].at(e, l);
        const double q = queues[c].at(v, l);
        const double over = (out - q) / std::max(1.0, q);
        rep.worst_availability = std::max(rep.worst_availability, over);
        if (over > tolerance) ++rep.violations;
      }
    }
  }
  for_each_resource(view, capacities, [&](std::span<const ResourceUse> uses, double cap, bool processing) {
    const double over = (resource_load(view, uses, x, processing) - cap) / std::max(1.0, cap);
    rep.worst_capacity = std::max(rep.worst_capacity, over);
    if (over > tolerance) ++rep.violations;
  });
  return rep;
}

void repair_decision(const ControlView& view, EdgeTables& x, const NodeTables& queues, const Capacities& capacities,
                     double tolerance) {
  for (auto& t : x) {
    for (double& v : t.raw()) {
      if (v < 0.0) {
        if (-v > tolerance * 1e3) throw SimulationError("flow-matching produced a negative flow");
        v = 0.0;
      }
    }
  }
  for (std::size_t c = 0; c < view.num_commodities(); ++c) {
    const auto& cv = view.commodity(c);
    const auto& g = *cv.graph;
    for (int v = 0; v < static_cast<int>(g.num_nodes()); ++v) {
      for (int l = 1; l <= cv.max_lifetime; ++l) {
        double out = 0.0;
        for (int e : g.out_edges(v)) out += x[c].at(e, l);
        const double q = queues[c].at(v, l);
        if (out <= q) continue;
        if (out - q > tolerance * std::max(1.0, q)) {
          std::ostringstream msg;
          msg << "flow-matching overdraws commodity " << cv.commodity->id << " at " << node_label(g, v)
              << " lifetime " << l << ": " << out << " > " << q;
          throw SimulationError(msg.str());
        }
        const double f = out > 0.0 ? q / out : 0.0;
        for (int e : g.out_edges(v)) x[c].at(e, l) *= f;
      }
    }
  }
  for_each_resource(view, capacities, [&](std::span<const ResourceUse> uses, double cap, bool processing) {
    const double load = resource_load(view, uses, x, processing);
    if (load <= cap) return;
    if (load - cap > tolerance * std::max(1.0, cap)) {
      std::ostringstream msg;
      msg << "flow-matching exceeds a " << (processing ? "node" : "link") << " capacity: " << load << " > " << cap;
      throw SimulationError(msg.str());
    }
    const double f = cap / load;
    for (const auto& u : uses) {
      for (double& v : x[u.commodity].row(u.edge)) v *= f;
    }
  });
}

}  // namespace cnc
