#pragma once

// Per-commodity handles on the layered graphs plus the reverse index from a
// physical resource to every (commodity, layered edge) that consumes it.
// Rebuilt whenever the topology changes.

#include <span>
#include <vector>

#include "cnc/lifetime_table.hpp"
#include "cnc/model.hpp"

namespace cnc {

struct CommodityView {
  const Commodity* commodity = nullptr;
  const ServiceChain* service = nullptr;
  const LayeredGraph* graph = nullptr;
  int source = -1;       // layered index of the source on the first layer
  int destination = -1;  // layered index of the destination on the last layer
  int max_lifetime = 1;
  double final_scaling = 1.0;  // Xi at the last stage
  std::vector<double> beta;    // per layered node

  // Edges leaving the destination copy never carry flow.
  bool edge_active(int e) const { return graph->edge(e).tail != destination; }
};

struct ResourceUse {
  int commodity = 0;
  int edge = 0;
};

class ControlView {
 public:
  ControlView() = default;
  ControlView(const PhysicalNetwork& network, std::span<const LayeredGraph> graphs,
              std::span<const ServiceChain> services, std::span<const Commodity> commodities);

  const PhysicalNetwork& network() const { return *network_; }
  std::size_t num_commodities() const { return commodities_.size(); }
  const CommodityView& commodity(std::size_t c) const { return commodities_[c]; }
  std::span<const CommodityView> commodities() const { return commodities_; }

  // Sorted by (commodity, stage): the order used for tie-breaking.
  std::span<const ResourceUse> link_uses(std::size_t link) const { return link_uses_[link]; }
  std::span<const ResourceUse> node_uses(std::size_t node) const { return node_uses_[node]; }

  // One zeroed table per commodity, rows = layered edges / layered nodes.
  std::vector<LifetimeTable> edge_tables() const;
  std::vector<LifetimeTable> node_tables() const;

 private:
  const PhysicalNetwork* network_ = nullptr;
  std::vector<CommodityView> commodities_;
  std::vector<std::vector<ResourceUse>> link_uses_;
  std::vector<std::vector<ResourceUse>> node_uses_;
};

// Per-commodity flow-like quantity indexed by (layered edge, lifetime).
using EdgeTables = std::vector<LifetimeTable>;
// Per-commodity quantity indexed by (layered node, lifetime).
using NodeTables = std::vector<LifetimeTable>;

}  // namespace cnc
