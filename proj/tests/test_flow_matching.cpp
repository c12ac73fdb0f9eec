#include <doctest.h>

#include <random>

#include "cnc/engine.hpp"
#include "cnc/flow_matching.hpp"
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
  EdgeTables R;
  NodeTables Q, abar;
  Capacities caps;

  Setup(PhysicalNetwork n, std::vector<ServiceChain> s, std::vector<Commodity> c)
      : net(std::move(n)), services(std::move(s)), commodities(std::move(c)) {
    for (const auto& svc : services) graphs.emplace_back(net, svc);
    view = ControlView(net, graphs, services, commodities);
    R = view.edge_tables();
    Q = view.node_tables();
    abar = view.node_tables();
    caps = Capacities::actual(net);
  }

  FlowMatchingInput input(int lookahead) const { return {&view, &R, &Q, &abar, &caps, lookahead}; }
};

}  // namespace

TEST_CASE("request queue update") {
  EdgeTables R{LifetimeTable(1, 1)}, nu{LifetimeTable(1, 1)}, x{LifetimeTable(1, 1)};
  nu[0].at(0, 1) = 140000.0;
  x[0].at(0, 1) = 100000.0;
  update_request_queues(R, nu, x);
  CHECK(R[0].at(0, 1) == 40000.0);
  nu[0].at(0, 1) = 0.0;
  x[0].at(0, 1) = 40000.0;
  update_request_queues(R, nu, x);
  CHECK(R[0].at(0, 1) == 0.0);
  x[0].at(0, 1) = 5.0;
  update_request_queues(R, nu, x);
  CHECK(R[0].at(0, 1) == -5.0);
}

TEST_CASE("delayed column sum shifts lifetimes") {
  CHECK(g_tau({{0, 0, 1}}, 1) == std::vector<double>{0, 1, 0});
  CHECK(g_tau({{1, 0}, {0, 2}}, 2) == std::vector<double>{2, 0});
  CHECK(g_tau({{1, 0}, {0, 2}}, 0) == std::vector<double>{0, 0});
  CHECK(g_tau({{0, 0, 5}}, 1) == std::vector<double>{0, 5, 0});
  CHECK(g_tau({{0, 0, 5}, {0, 0, 0}}, 2) == std::vector<double>{5, 0, 0});
}

TEST_CASE("two-node instance sends the whole backlog") {
  Setup s(line_network(2, 10, 10), {chain(1, {}, {})}, {{1, 0, 1, 2, 1, 2, 0.9}});
  const int e = s.graphs[0].edge_index(0, 1);
  s.Q[0].at(0, 2) = 3.0;
  s.R[0].at(e, 2) = 1.0;
  const auto problem = build_flow_matching_lp(s.input(1), true);
  CHECK(problem.variables.size() == 1);
  CHECK(problem.row_labels.size() == problem.lp.num_rows());
  RevisedSimplex solver;
  const auto plan = solve_flow_matching(s.view, problem, solver);
  CHECK(plan.objective == doctest::Approx(3.0));
  CHECK(oracle::vertex_enumeration(problem.lp) == doctest::Approx(3.0));
  const auto x = extract_decision(plan);
  CHECK(x[0].at(e, 2) == doctest::Approx(3.0));
  CHECK(x[0].at(e, 1) == 0.0);
}

TEST_CASE("single-slot look-ahead bounds each cohort by its backlog") {
  Setup s(line_network(3, 100, 10), {chain(1, {}, {})}, {{1, 0, 1, 3, 1, 3, 0.9}});
  const auto& g = s.graphs[0];
  const int n1 = g.node_index(1, 1), n2 = g.node_index(2, 1), n3 = g.node_index(3, 1);
  s.Q[0].at(n1, 3) = 4.0;
  s.Q[0].at(n2, 2) = 7.0;
  s.abar[0].at(n1, 3) = 50.0;  // estimated arrivals cannot be sent in the current slot
  for (int l = 1; l <= 3; ++l) {
    s.R[0].at(g.edge_index(n1, n2), l) = 1.0;
    s.R[0].at(g.edge_index(n2, n3), l) = 1.0;
  }
  RevisedSimplex solver;
  const auto x = extract_decision(solve_flow_matching(s.view, build_flow_matching_lp(s.input(1)), solver));
  CHECK(x[0].at(g.edge_index(n1, n2), 3) == doctest::Approx(4.0));
  CHECK(x[0].at(g.edge_index(n2, n3), 2) == doctest::Approx(7.0));
  CHECK(x[0].total() == doctest::Approx(11.0));
}

TEST_CASE("two-slot plan forwards inflow in the second slot") {
  Setup s(line_network(3, 100, 10), {chain(1, {}, {})}, {{1, 0, 1, 3, 1, 3, 0.9}});
  const auto& g = s.graphs[0];
  const int n1 = g.node_index(1, 1), n2 = g.node_index(2, 1), n3 = g.node_index(3, 1);
  s.Q[0].at(n1, 3) = 4.0;
  s.R[0].at(g.edge_index(n1, n2), 3) = 0.5;
  s.R[0].at(g.edge_index(n2, n3), 2) = 1.0;
  const auto problem = build_flow_matching_lp(s.input(2));
  RevisedSimplex solver;
  const auto plan = solve_flow_matching(s.view, problem, solver);
  REQUIRE(plan.slots.size() == 2);
  CHECK(plan.slots[0][0].at(g.edge_index(n1, n2), 3) == doctest::Approx(4.0));
  CHECK(plan.slots[1][0].at(g.edge_index(n2, n3), 2) == doctest::Approx(4.0));
  CHECK(plan.objective == doctest::Approx(6.0));
  CHECK(oracle::vertex_enumeration(problem.lp) == doctest::Approx(6.0));
}

TEST_CASE("capacity is shared between commodities on one link") {
  Setup s(line_network(2, 5, 10), {chain(1, {}, {})}, {{1, 0, 1, 2, 1, 2, 0.9}, {2, 0, 1, 2, 1, 2, 0.9}});
  const int e = s.graphs[0].edge_index(0, 1);
  s.Q[0].at(0, 2) = 4.0;
  s.Q[1].at(0, 2) = 4.0;
  s.R[0].at(e, 2) = 1.0;
  s.R[1].at(e, 2) = 2.0;
  RevisedSimplex solver;
  const auto x = extract_decision(solve_flow_matching(s.view, build_flow_matching_lp(s.input(1)), solver));
  CHECK(x[1].at(e, 2) == doctest::Approx(4.0));
  CHECK(x[0].at(e, 2) == doctest::Approx(1.0));
  const auto rep = check_admissibility(s.view, x, s.Q, s.caps);
  CHECK(rep.violations == 0);
}

TEST_CASE("random flow-matching programs agree with vertex enumeration") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.0, 6.0);
  std::bernoulli_distribution coin(0.5);
  RevisedSimplex solver;
  int solved = 0;
  for (int round = 0; round < 60; ++round) {
    Setup s(line_network(2, 1.0 + u(rng), 1.0 + u(rng)), {chain(1, {1.5}, {0.5})}, {{1, 0, 1, 2, 1, 2, 0.9}});
    for (double& v : s.Q[0].raw()) v = coin(rng) ? std::round(u(rng)) : 0.0;
    for (double& v : s.R[0].raw()) v = coin(rng) ? std::round(u(rng) - 2.0) : 0.0;
    for (std::size_t v = 0; v < s.Q[0].rows(); ++v) s.Q[0].at(v, 0) = 0.0;
    for (std::size_t e = 0; e < s.R[0].rows(); ++e) s.R[0].at(e, 0) = 0.0;
    const auto problem = build_flow_matching_lp(s.input(1 + round % 2));
    if (problem.variables.size() > 9) continue;
    const auto plan = solve_flow_matching(s.view, problem, solver);
    CHECK(plan.objective == doctest::Approx(oracle::vertex_enumeration(problem.lp)).epsilon(1e-7));
    const auto rep = check_admissibility(s.view, extract_decision(plan), s.Q, s.caps, 1e-9);
    CHECK(rep.violations == 0);
    ++solved;
  }
  CHECK(solved > 30);
}

TEST_CASE("extract decision returns the first planned column") {
  FlowPlan plan;
  plan.slots.resize(2, EdgeTables{LifetimeTable(1, 2)});
  plan.slots[0][0].at(0, 2) = 3.0;
  plan.slots[1][0].at(0, 1) = 9.0;
  const auto x = extract_decision(plan);
  CHECK(x[0].at(0, 2) == 3.0);
  CHECK(x[0].at(0, 1) == 0.0);
}

TEST_CASE("repair removes round-off and rejects real overdraws") {
  Setup s(line_network(2, 10, 10), {chain(1, {}, {})}, {{1, 0, 1, 2, 1, 2, 0.9}});
  const int e = s.graphs[0].edge_index(0, 1);
  s.Q[0].at(0, 2) = 3.0;
  auto x = s.view.edge_tables();
  x[0].at(e, 2) = 3.0 * (1.0 + 1e-10);
  x[0].at(e, 1) = -1e-12;
  repair_decision(s.view, x, s.Q, s.caps);
  CHECK(x[0].at(e, 2) <= 3.0);
  CHECK(x[0].at(e, 1) == 0.0);
  CHECK(check_admissibility(s.view, x, s.Q, s.caps, 0.0).violations == 0);
  x[0].at(e, 2) = 4.0;
  CHECK_THROWS_AS(repair_decision(s.view, x, s.Q, s.caps), SimulationError);
}

TEST_CASE("executed flows stay admissible over an Abilene run") {
  const auto config = cnc::testing::small_abilene(120, 60);
  auto scenario = build_scenario(config);
  auto policy = config.policy;
  policy.frame_length = 40;
  const auto result = run_trial(scenario, policy, 3);
  CHECK(result.admissibility_checks == 120);
  CHECK(result.worst_availability <= 1e-9);
  CHECK(result.worst_capacity <= 1e-9);
}

TEST_CASE("variable labels follow the layered graph") {
  Setup s(line_network(2, 10, 10), {chain(1, {}, {})}, {{1, 0, 1, 2, 1, 2, 0.9}});
  s.Q[0].at(0, 2) = 3.0;
  s.R[0].at(s.graphs[0].edge_index(0, 1), 2) = 1.0;
  const auto problem = build_flow_matching_lp(s.input(1));
  const auto labels = variable_labels(s.view, problem);
  REQUIRE(labels.size() == 1);
  CHECK(labels[0] == "x_c0_1_1_2_1_l2_s0");
}
