#include "cnc/control_view.hpp"

#include <algorithm>

namespace cnc {

ControlView::ControlView(const PhysicalNetwork& network, std::span<const LayeredGraph> graphs,
                         std::span<const ServiceChain> services, std::span<const Commodity> commodities)
    : network_(&network) {
  commodities_.reserve(commodities.size());
  for (const auto& c : commodities) {
    if (c.service < 0 || static_cast<std::size_t>(c.service) >= services.size() ||
        static_cast<std::size_t>(c.service) >= graphs.size()) {
      throw ConfigError("commodity " + std::to_string(c.id) + ": unknown service index");
    }
    CommodityView v;
    v.commodity = &c;
    v.service = &services[c.service];
    v.graph = &graphs[c.service];
    v.source = v.graph->node_index(c.source, 1);
    v.destination = v.graph->node_index(c.destination, v.graph->num_stages());
    if (v.source < 0 || v.destination < 0) {
      throw ConfigError("commodity " + std::to_string(c.id) + ": source or destination not in network");
    }
    v.max_lifetime = c.max_lifetime;
    v.final_scaling = cumulative_scaling(*v.service, v.graph->num_stages());
    v.beta.resize(v.graph->num_nodes());
    for (std::size_t n = 0; n < v.graph->num_nodes(); ++n) {
      v.beta[n] = 1.0 / cumulative_scaling(*v.service, v.graph->node(static_cast<int>(n)).stage);
    }
    commodities_.push_back(std::move(v));
  }

  link_uses_.assign(network.num_links(), {});
  node_uses_.assign(network.num_nodes(), {});
  for (std::size_t c = 0; c < commodities_.size(); ++c) {
    const auto& v = commodities_[c];
    for (std::size_t e = 0; e < v.graph->num_edges(); ++e) {
      if (!v.edge_active(static_cast<int>(e))) continue;
      const auto& edge = v.graph->edge(static_cast<int>(e));
      auto& bucket = edge.kind == EdgeKind::Transmission ? link_uses_[edge.resource] : node_uses_[edge.resource];
      bucket.push_back({static_cast<int>(c), static_cast<int>(e)});
    }
  }
  auto by_commodity_stage = [&](const ResourceUse& a, const ResourceUse& b) {
    if (a.commodity != b.commodity) return a.commodity < b.commodity;
    const auto& ga = *commodities_[a.commodity].graph;
    return ga.edge(a.edge).stage < ga.edge(b.edge).stage;
  };
  for (auto& b : link_uses_) std::sort(b.begin(), b.end(), by_commodity_stage);
  for (auto& b : node_uses_) std::sort(b.begin(), b.end(), by_commodity_stage);
}

std::vector<LifetimeTable> ControlView::edge_tables() const {
  std::vector<LifetimeTable> out;
  out.reserve(commodities_.size());
  for (const auto& v : commodities_) out.emplace_back(v.graph->num_edges(), v.max_lifetime);
  return out;
}

std::vector<LifetimeTable> ControlView::node_tables() const {
  std::vector<LifetimeTable> out;
  out.reserve(commodities_.size());
  for (const auto& v : commodities_) out.emplace_back(v.graph->num_nodes(), v.max_lifetime);
  return out;
}

}  // namespace cnc
