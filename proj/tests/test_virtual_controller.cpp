#include <doctest.h>

#include <cmath>
#include <random>

#include "cnc/config.hpp"
#include "cnc/virtual_controller.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cnc;
using cnc::testing::chain;
using cnc::testing::line_network;

namespace {

struct Setup {
  PhysicalNetwork net;
  std::vector<ServiceChain> services;
  std::vector<LayeredGraph> graphs;
  std::vector<Commodity> commodities;
  ControlView view;

  Setup(PhysicalNetwork n, std::vector<ServiceChain> s, std::vector<Commodity> c)
      : net(std::move(n)), services(std::move(s)), commodities(std::move(c)) {
    for (const auto& svc : services) graphs.emplace_back(net, svc);
    view = ControlView(net, graphs, services, commodities);
  }
};

}  // namespace

TEST_CASE("reliability queue accumulates gamma * Xi * arrivals minus deliveries") {
  Setup s(line_network(2, 100, 100), {chain(1, {}, {})}, {{1, 0, 1, 2, 1, 2, 0.9}});
  auto U = make_virtual_queues(s.view);
  auto nu = s.view.edge_tables();
  auto a = s.view.node_tables();
  a[0].at(s.view.commodity(0).source, 2) = 10.0;
  update_virtual_queues(s.view, U, nu, a);
  CHECK(U.reliability[0] == doctest::Approx(9.0));
  nu[0].at(s.graphs[0].edge_index(0, 1), 2) = 20.0;
  a[0].fill(0.0);
  update_virtual_queues(s.view, U, nu, a);
  CHECK(U.reliability[0] == 0.0);
}

TEST_CASE("causality queue takes max with zero") {
  Setup s(line_network(3, 100, 100), {chain(1, {}, {})}, {{1, 0, 1, 3, 1, 2, 0.9}});
  const auto& g = s.graphs[0];
  const int n1 = g.node_index(1, 1), n2 = g.node_index(2, 1), n3 = g.node_index(3, 1);
  auto U = make_virtual_queues(s.view);
  auto nu = s.view.edge_tables();
  auto a = s.view.node_tables();
  // At node 2, lifetime 1: outgoing nu^{>=1} = 4, incoming zeta nu^{>=2} = 5.
  nu[0].at(g.edge_index(n2, n3), 1) = 4.0;
  nu[0].at(g.edge_index(n1, n2), 2) = 5.0;
  update_virtual_queues(s.view, U, nu, a);
  CHECK(U.causality[0].at(n2, 1) == 0.0);
  // Sending from node 2 without inflow builds up a causality backlog.
  nu[0].fill(0.0);
  nu[0].at(g.edge_index(n2, n3), 2) = 3.0;
  update_virtual_queues(s.view, U, nu, a);
  CHECK(U.causality[0].at(n2, 1) == 3.0);
  CHECK(U.causality[0].at(n2, 2) == 3.0);
}

TEST_CASE("transmission weight plug-in") {
  Setup s(line_network(3, 100, 100, 1e-4), {chain(1, {}, {})}, {{1, 0, 1, 3, 1, 2, 0.9}});
  const auto& g = s.graphs[0];
  const int n1 = g.node_index(1, 1), n2 = g.node_index(2, 1);
  auto U = make_virtual_queues(s.view);
  U.causality[0].at(n1, 1) = 2.0;   // U_1^{<=2} = 2
  U.causality[0].at(n2, 1) = 10.0;  // U_2^{<=1} = 10
  const auto w = compute_weights(s.view, U, 1e4);  // V e = 1
  CHECK(w[0].at(g.edge_index(n1, n2), 2) == doctest::Approx(7.0));
  // At lifetime 1 the head term U^{<=0} vanishes.
  CHECK(w[0].at(g.edge_index(n1, n2), 1) == doctest::Approx(-3.0));
}

TEST_CASE("processing weight into the destination uses U_d") {
  PhysicalNetwork net({{1, 10.0, 0.0}, {2, 10.0, 0.5}}, {{1, 2, 100.0, 1e-4}, {2, 1, 100.0, 1e-4}});
  Setup s(net, {chain(1, {2.3}, {1.0 / 800})}, {{1, 0, 1, 2, 1, 2, 0.9}});
  const auto& g = s.graphs[0];
  const int e = g.edge_index(g.node_index(2, 1), g.node_index(2, 2));
  auto U = make_virtual_queues(s.view);
  U.reliability[0] = 8.0;
  auto w = compute_weights(s.view, U, 0.0);
  CHECK(w[0].at(e, 1) == doctest::Approx(6400.0));
  const double V = 100.0;
  w = compute_weights(s.view, U, V);
  CHECK(w[0].at(e, 1) == doctest::Approx(6400.0 - V * 0.5));
}

TEST_CASE("edges leaving the destination are never chosen") {
  Setup s(line_network(3, 100, 100), {chain(1, {}, {})}, {{1, 0, 1, 2, 1, 2, 0.9}});
  const auto& g = s.graphs[0];
  auto U = make_virtual_queues(s.view);
  U.causality[0].at(g.node_index(3, 1), 1) = 1e6;
  const auto w = compute_weights(s.view, U, 0.0);
  CHECK(std::isinf(w[0].at(g.edge_index(g.node_index(2, 1), g.node_index(3, 1)), 2)));
}

TEST_CASE("single positive weight takes the full link capacity") {
  Setup s(line_network(2, 50, 100), {chain(1, {}, {})},
          {{1, 0, 1, 2, 1, 5, 0.9}, {2, 0, 1, 2, 1, 5, 0.9}});
  const auto& g = s.graphs[0];
  const int e = g.edge_index(0, 1);
  auto w = s.view.edge_tables();
  for (auto& t : w) t.fill(-1.0);
  w[1].at(e, 5) = 3.0;
  Capacities caps = Capacities::actual(s.net);
  caps.links[0] = 42.0;
  const auto nu = max_weight_assign(s.view, w, caps);
  CHECK(nu[1].at(e, 5) == 42.0);
  CHECK(nu[0].total() == 0.0);
  CHECK(nu[1].total() == 42.0);
}

TEST_CASE("processing tie goes to the lower commodity") {
  Setup s(line_network(1, 50, 10), {chain(1, {1.0}, {0.5})},
          {{1, 0, 1, 1, 3, 3, 0.9}, {2, 0, 1, 1, 3, 3, 0.9}});
  CHECK(s.graphs[0].num_edges() == 1);
  auto w = s.view.edge_tables();
  w[0].at(0, 3) = 2.0;
  w[1].at(0, 3) = 2.0;
  const auto nu = max_weight_assign(s.view, w, Capacities::actual(s.net));
  CHECK(nu[0].at(0, 3) == doctest::Approx(10.0 / 0.5));
  CHECK(nu[1].total() == 0.0);
}

TEST_CASE("no positive weight leaves the resource idle") {
  std::vector<MaxWeightCandidate> c{{0, 1, 1, 0.0}, {1, 2, 1, -3.0}};
  CHECK_FALSE(select_max_weight(c).has_value());
  CHECK_FALSE(select_max_weight(std::span<const MaxWeightCandidate>{}).has_value());
}

TEST_CASE("max-weight selection agrees with brute force on 500 instances") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 500; ++i) {
    const auto cands = oracle::random_candidates(rng, 1 + i % 12);
    const auto got = select_max_weight(cands);
    const auto want = oracle::brute_force_max_weight(cands);
    REQUIRE(got.has_value() == want.has_value());
    if (got) CHECK(*got == *want);
  }
}

TEST_CASE("max-weight allocation maximizes sum w nu per resource") {
  std::mt19937_64 rng(5);
  Setup s(line_network(4, 30, 20), {chain(1, {2.0}, {0.25}), chain(2, {}, {})},
          {{1, 0, 1, 4, 1, 3, 0.9}, {2, 1, 4, 1, 1, 3, 0.9}, {3, 0, 2, 3, 2, 3, 0.9}});
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const auto caps = Capacities::actual(s.net);
  for (int round = 0; round < 50; ++round) {
    auto w = s.view.edge_tables();
    for (auto& t : w) {
      for (double& v : t.raw()) v = u(rng);
    }
    const auto nu = max_weight_assign(s.view, w, caps);
    auto check = [&](std::span<const ResourceUse> uses, double cap, bool processing) {
      double best = 0.0;
      double got = 0.0;
      int nonzero = 0;
      for (const auto& use : uses) {
        const auto& cv = s.view.commodity(use.commodity);
        const double scale = processing ? cap / cv.graph->edge(use.edge).rho : cap;
        for (int l = 1; l <= cv.max_lifetime; ++l) {
          best = std::max(best, w[use.commodity].at(use.edge, l) * scale);
          const double f = nu[use.commodity].at(use.edge, l);
          if (f != 0.0) {
            ++nonzero;
            got += w[use.commodity].at(use.edge, l) * f;
          }
        }
      }
      CHECK(nonzero <= 1);
      CHECK(got == doctest::Approx(best));
    };
    for (std::size_t k = 0; k < s.net.num_links(); ++k) check(s.view.link_uses(k), caps.links[k], false);
    for (std::size_t i = 0; i < s.net.num_nodes(); ++i) check(s.view.node_uses(i), caps.nodes[i], true);
  }
}

TEST_CASE("penalty parameter on the bundled scenario") {
  const auto scenario = build_scenario(builtin_abilene());
  std::vector<LayeredGraph> graphs;
  for (const auto& svc : scenario.services) graphs.emplace_back(scenario.network, svc);
  const ControlView view(scenario.network, graphs, scenario.services, scenario.commodities);
  const auto p = choose_V(view, 5.0);
  CHECK(p.c_avg == doctest::Approx(139128.0).epsilon(1e-5));
  CHECK(p.e_avg == doctest::Approx(6.82488e-05).epsilon(1e-5));
  CHECK(p.v == doctest::Approx(1.01927e10).epsilon(1e-5));
  CHECK(p.v == doctest::Approx(5.0 * p.c_avg / p.e_avg));
  CHECK(choose_V(view, 0.0).v == 0.0);
}
