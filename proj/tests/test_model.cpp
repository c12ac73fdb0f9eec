#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <tuple>

#include "cnc/config.hpp"
#include "cnc/model.hpp"
#include "fixtures.hpp"

using namespace cnc;
using cnc::testing::chain;
using cnc::testing::line_network;

namespace {

Scenario abilene() { return build_scenario(builtin_abilene()); }

std::set<std::tuple<LayeredNodeKey, LayeredNodeKey>> edge_keys(const LayeredGraph& g) {
  std::set<std::tuple<LayeredNodeKey, LayeredNodeKey>> out;
  for (const auto& e : g.edges()) out.insert({g.node(e.tail), g.node(e.head)});
  return out;
}

}  // namespace

TEST_CASE("layered graph size follows M|V| nodes and M|E| + (M-1)|V| edges") {
  const auto s = abilene();
  REQUIRE(s.network.num_nodes() == 11);
  REQUIRE(s.network.num_links() == 28);
  for (const auto& svc : s.services) {
    const LayeredGraph g(s.network, svc);
    CHECK(g.num_stages() == 3);
    CHECK(g.num_nodes() == 33);
    CHECK(g.num_edges() == 106);
  }
  // A one-function chain on the same topology: 22 nodes, 28*2 + 11 = 67 edges.
  const LayeredGraph one(s.network, chain(9, {1.0}, {0.002}));
  CHECK(one.num_nodes() == 22);
  CHECK(one.num_edges() == 67);
}

TEST_CASE("service without functions has a single layer") {
  const auto net = line_network(4, 10.0, 5.0);
  const LayeredGraph g(net, chain(1, {}, {}));
  CHECK(g.num_stages() == 1);
  CHECK(g.num_nodes() == 4);
  CHECK(std::none_of(g.edges().begin(), g.edges().end(),
                     [](const LayeredEdge& e) { return e.kind == EdgeKind::Processing; }));
}

TEST_CASE("two-node line with one function enumerates by hand") {
  PhysicalNetwork net({{1, 5.0, 1.0}, {2, 5.0, 1.0}}, {{1, 2, 10.0, 1.0}});
  const LayeredGraph g(net, chain(1, {2.0}, {0.5}));
  REQUIRE(g.num_nodes() == 4);
  std::set<std::tuple<LayeredNodeKey, LayeredNodeKey>> expected = {
      {{1, 1}, {2, 1}}, {{1, 2}, {2, 2}}, {{1, 1}, {1, 2}}, {{2, 1}, {2, 2}}};
  CHECK(edge_keys(g) == expected);
  for (const auto& e : g.edges()) {
    if (e.kind == EdgeKind::Transmission) {
      CHECK(e.zeta == 1.0);
      CHECK(e.rho == 1.0);
    } else {
      CHECK(e.zeta == 2.0);
      CHECK(e.rho == 0.5);
    }
  }
}

TEST_CASE("layered edges are ordered by (tail, head)") {
  const auto s = abilene();
  const LayeredGraph g(s.network, s.services[0]);
  for (std::size_t e = 1; e < g.num_edges(); ++e) {
    const auto& a = g.edge(static_cast<int>(e - 1));
    const auto& b = g.edge(static_cast<int>(e));
    CHECK(std::tie(a.tail, a.head) < std::tie(b.tail, b.head));
  }
}

TEST_CASE("cumulative scaling of the bundled services") {
  const auto s = abilene();
  CHECK(cumulative_scaling(s.services[0], 1) == 1.0);
  CHECK(cumulative_scaling(s.services[0], 3) == doctest::Approx(2.3));
  CHECK(cumulative_scaling(s.services[1], 3) == doctest::Approx(1.0 / 6.0));
  CHECK_THROWS_AS(cumulative_scaling(s.services[0], 4), std::out_of_range);
  CHECK_THROWS_AS(cumulative_scaling(s.services[0], 0), std::out_of_range);
  for (const auto& svc : s.services) {
    for (int m = 1; m < svc.stages(); ++m) {
      CHECK(cumulative_scaling(svc, m + 1) == doctest::Approx(cumulative_scaling(svc, m) * svc.scaling[m - 1]));
    }
  }
}

TEST_CASE("beta weights are 1/Xi of the node's stage") {
  const auto s = abilene();
  const LayeredGraph g1(s.network, s.services[0]);
  const LayeredGraph g2(s.network, s.services[1]);
  CHECK(beta_weight(g1, s.services[0], g1.node_index(1, 1)) == 1.0);
  CHECK(beta_weight(g1, s.services[0], g1.node_index(7, 2)) == doctest::Approx(1.0));
  CHECK(beta_weight(g1, s.services[0], g1.node_index(7, 3)) == doctest::Approx(1.0 / 2.3));
  CHECK(beta_weight(g2, s.services[1], g2.node_index(10, 3)) == doctest::Approx(6.0));
}

TEST_CASE("outage of Abilene node 6 removes it and its links") {
  const auto s = abilene();
  OutageSpec spec;
  spec.time = 10;
  spec.failed_nodes = {6};
  const auto out = apply_outage(s.network, s.services, s.commodities, spec);
  CHECK(out.network.num_nodes() == 10);
  CHECK(out.network.num_links() == 22);
  CHECK_FALSE(out.network.has_node(6));
  for (const auto& l : out.network.links()) {
    CHECK(l.from != 6);
    CHECK(l.to != 6);
  }
  for (const auto& g : out.graphs) {
    CHECK(g.num_nodes() == 30);
    CHECK(g.num_edges() == 3 * 22 + 2 * 10);
  }
}

TEST_CASE("empty failure set is the identity") {
  const auto s = abilene();
  OutageSpec spec;
  spec.time = 0;
  const auto out = apply_outage(s.network, s.services, s.commodities, spec);
  CHECK(out.network.num_links() == s.network.num_links());
  CHECK(edge_keys(out.graphs[0]) == edge_keys(LayeredGraph(s.network, s.services[0])));
}

TEST_CASE("failing one direction of a triangle link keeps five directed links") {
  PhysicalNetwork net({{1, 1.0, 0.0}, {2, 1.0, 0.0}, {3, 1.0, 0.0}},
                      {{1, 2, 5, 0}, {2, 1, 5, 0}, {2, 3, 5, 0}, {3, 2, 5, 0}, {1, 3, 5, 0}, {3, 1, 5, 0}});
  std::vector<ServiceChain> services{chain(1, {}, {})};
  std::vector<Commodity> commodities{{1, 0, 1, 3, 1, 2, 0.5}};
  OutageSpec spec;
  spec.time = 0;
  spec.failed_links = {{1, 2}};
  const auto out = apply_outage(net, services, commodities, spec);
  CHECK(out.network.num_nodes() == 3);
  CHECK(out.network.num_links() == 5);
  CHECK_FALSE(out.network.link_index(1, 2).has_value());
  CHECK(out.network.link_index(2, 1).has_value());
}

TEST_CASE("failing a commodity endpoint is a configuration error") {
  const auto s = abilene();
  OutageSpec spec;
  spec.time = 0;
  spec.failed_nodes = {7};
  CHECK_THROWS_AS(apply_outage(s.network, s.services, s.commodities, spec), ConfigError);
}

TEST_CASE("outage then layering equals layering then deleting failed copies") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 4 + trial % 3;
    std::vector<NodeResource> nodes;
    std::vector<Link> links;
    for (int i = 1; i <= n; ++i) nodes.push_back({i, 3.0, 0.1});
    std::bernoulli_distribution coin(0.5);
    for (int i = 1; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i != j && coin(rng)) links.push_back({i, j, 4.0, 0.2});
      }
    }
    const PhysicalNetwork net(nodes, links);
    const auto svc = chain(1, {0.5, 3.0}, {0.1, 0.2});
    std::vector<ServiceChain> services{svc};
    std::vector<Commodity> commodities{{1, 0, 1, 2, 1, 3, 0.5}};
    OutageSpec spec;
    spec.time = 0;
    if (n > 3) spec.failed_nodes = {n};
    if (!links.empty() && links.front().from != n && links.front().to != n) {
      spec.failed_links = {{links.front().from, links.front().to}};
    }
    const auto out = apply_outage(net, services, commodities, spec);
    const LayeredGraph full(net, svc);
    std::set<std::tuple<LayeredNodeKey, LayeredNodeKey>> expected;
    for (const auto& e : full.edges()) {
      const auto a = full.node(e.tail), b = full.node(e.head);
      const bool dead_node = std::find(spec.failed_nodes.begin(), spec.failed_nodes.end(), a.node) !=
                                 spec.failed_nodes.end() ||
                             std::find(spec.failed_nodes.begin(), spec.failed_nodes.end(), b.node) !=
                                 spec.failed_nodes.end();
      const bool dead_link = e.kind == EdgeKind::Transmission &&
                             std::find(spec.failed_links.begin(), spec.failed_links.end(),
                                       std::pair<NodeId, NodeId>{a.node, b.node}) != spec.failed_links.end();
      if (!dead_node && !dead_link) expected.insert({a, b});
    }
    CHECK(edge_keys(out.graphs[0]) == expected);
  }
}

TEST_CASE("layered node and edge maps follow surviving elements") {
  const auto s = abilene();
  OutageSpec spec;
  spec.time = 0;
  spec.failed_nodes = {6};
  const auto out = apply_outage(s.network, s.services, s.commodities, spec);
  const LayeredGraph before(s.network, s.services[0]);
  const auto& after = out.graphs[0];
  const auto nodes = map_layered_nodes(before, after);
  const auto edges = map_layered_edges(before, after);
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (before.node(static_cast<int>(v)).node == 6) {
      CHECK(nodes[v] == -1);
    } else {
      REQUIRE(nodes[v] >= 0);
      CHECK(after.node(nodes[v]) == before.node(static_cast<int>(v)));
    }
  }
  CHECK(std::count_if(edges.begin(), edges.end(), [](int e) { return e >= 0; }) ==
        static_cast<long>(after.num_edges()));
}

TEST_CASE("unit conversion") {
  const UnitSystem u;
  CHECK(convert_rate(u, 10.0, RateUnit::Gbps, RateUnit::PacketsPerSlot) == doctest::Approx(140000.0));
  CHECK(convert_rate(u, 0.0, RateUnit::Gbps, RateUnit::PacketsPerSlot) == 0.0);
  CHECK(convert_rate(u, 1.64, RateUnit::Gbps, RateUnit::PacketsPerSlot) == doctest::Approx(22960.0));
  // 1/500 CPU per Mbps; one packet per slot is 1000 bits / 14 ms = 0.0714 Mbps.
  CHECK(convert_rate(u, 1.0 / 500, RateUnit::CpuPerMbps, RateUnit::CpuPerPacketRate) ==
        doctest::Approx(1.0 / 500 * 1000.0 / 0.014 / 1e6));
  CHECK(convert_rate(u, 1.0, RateUnit::CostPerGbps, RateUnit::CostPerPacket) == doctest::Approx(1.0 / 140000.0 * 10.0));
  for (double v : {0.1, 1.64, 2.46, 10.0, 123.456}) {
    const double there = convert_rate(u, v, RateUnit::Gbps, RateUnit::PacketsPerSlot);
    const double back = convert_rate(u, there, RateUnit::PacketsPerSlot, RateUnit::Gbps);
    CHECK(std::abs(back - v) <= 1e-12 * v);
    const double w = convert_rate(u, v, RateUnit::CpuPerMbps, RateUnit::CpuPerPacketRate);
    CHECK(std::abs(convert_rate(u, w, RateUnit::CpuPerPacketRate, RateUnit::CpuPerMbps) - v) <= 1e-12 * v);
  }
  CHECK_THROWS_AS(convert_rate(u, 1.0, RateUnit::Gbps, RateUnit::CpuPerMbps), std::invalid_argument);
  UnitSystem bad;
  bad.packet_bits = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("network and service validation") {
  CHECK_THROWS_AS(PhysicalNetwork({{1, 1.0, 0.0}}, {{1, 1, 1.0, 0.0}}), ConfigError);
  CHECK_THROWS_AS(PhysicalNetwork({{1, 1.0, 0.0}}, {{1, 2, 1.0, 0.0}}), ConfigError);
  CHECK_THROWS_AS(PhysicalNetwork({{1, 0.0, 0.0}, {2, 1.0, 0.0}}, {{1, 2, 1.0, 0.0}}), ConfigError);
  CHECK_THROWS_AS(chain(1, {0.0}, {1.0}).validate(), ConfigError);
  CHECK_THROWS_AS(chain(1, {1.0}, {}).validate(), ConfigError);
  Commodity c{1, 0, 1, 1, 1, 2, 0.5};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  Commodity d{1, 0, 1, 2, 3, 2, 0.5};
  CHECK_THROWS_AS(d.validate(), ConfigError);
}
