#pragma once

#include <random>
#include <vector>

#include "cnc/config.hpp"
#include "cnc/engine.hpp"

namespace cnc::testing {

// Nodes 1..n on a line with links in both directions.
inline PhysicalNetwork line_network(int n, double link_cap, double node_cap, double link_cost = 1e-4,
                                    double node_cost = 0.5) {
  std::vector<NodeResource> nodes;
  std::vector<Link> links;
  for (int i = 1; i <= n; ++i) nodes.push_back({i, node_cap, node_cost});
  for (int i = 1; i < n; ++i) {
    links.push_back({i, i + 1, link_cap, link_cost});
    links.push_back({i + 1, i, link_cap, link_cost});
  }
  return PhysicalNetwork(std::move(nodes), std::move(links));
}

inline ServiceChain chain(int id, std::vector<double> scaling, std::vector<double> workload) {
  ServiceChain s;
  s.id = id;
  s.scaling = std::move(scaling);
  s.workload = std::move(workload);
  return s;
}

// Single commodity from node 1 to node n of a line; every lifetime class
// in [lmin, lmax] arrives with `rate` packets per slot.
inline Scenario line_scenario(int n, double rate, double link_cap, int lmin, int lmax, double gamma,
                              ServiceChain service = chain(1, {}, {}), double node_cap = 100.0) {
  Scenario s;
  s.network = line_network(n, link_cap, node_cap);
  s.services.push_back(std::move(service));
  s.commodities.push_back({1, 0, 1, n, lmin, lmax, gamma});
  for (int l = lmin; l <= lmax; ++l) s.arrivals.push_back({0, 1, l, rate, rate});
  return s;
}

inline PolicyConfig small_policy(std::int64_t horizon) {
  PolicyConfig p;
  p.horizon = horizon;
  p.frame_length = 500;
  p.threshold_link = 1.0;
  p.threshold_node = 0.01;
  return p;
}

// Abilene at reduced scale for tests that need the real topology.
inline ScenarioConfig small_abilene(std::int64_t horizon, std::int64_t outage_at, int trials = 1) {
  Overrides o;
  o.horizon = horizon;
  o.outage_at = outage_at;
  o.trials = trials;
  return apply_overrides(builtin_abilene(), o);
}

}  // namespace cnc::testing
