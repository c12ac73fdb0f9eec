#include "cnc/model.hpp"

#include <algorithm>
#include <tuple>
#include <cmath>
#include <map>
#include <set>

namespace cnc {

PhysicalNetwork::PhysicalNetwork(std::vector<NodeResource> nodes, std::vector<Link> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
  std::sort(nodes_.begin(), nodes_.end(),
            [](const NodeResource& a, const NodeResource& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (nodes_[i].id == nodes_[i - 1].id) {
      throw ConfigError("duplicate node id " + std::to_string(nodes_[i].id));
    }
  }
  for (const auto& n : nodes_) {
    if (!(n.capacity > 0.0)) throw ConfigError("node " + std::to_string(n.id) + ": capacity must be positive");
    if (n.cost < 0.0) throw ConfigError("node " + std::to_string(n.id) + ": negative cost");
  }
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& l : links_) {
    const std::string name = "link (" + std::to_string(l.from) + "," + std::to_string(l.to) + ")";
    if (l.from == l.to) throw ConfigError(name + ": self-loop");
    if (!has_node(l.from) || !has_node(l.to)) throw ConfigError(name + ": unknown endpoint");
    if (!(l.capacity > 0.0)) throw ConfigError(name + ": capacity must be positive");
    if (l.cost < 0.0) throw ConfigError(name + ": negative cost");
    if (!seen.insert({l.from, l.to}).second) throw ConfigError(name + ": duplicate");
  }
}

std::optional<std::size_t> PhysicalNetwork::node_index(NodeId id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                             [](const NodeResource& n, NodeId v) { return n.id < v; });
  if (it == nodes_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::optional<std::size_t> PhysicalNetwork::link_index(NodeId from, NodeId to) const {
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (links_[i].from == from && links_[i].to == to) return i;
  }
  return std::nullopt;
}

void ServiceChain::validate() const {
  if (scaling.size() != workload.size()) {
    throw ConfigError("service " + std::to_string(id) + ": scaling and workload lists differ in length");
  }
  for (std::size_t m = 0; m < scaling.size(); ++m) {
    if (!(scaling[m] > 0.0) || !(workload[m] > 0.0)) {
      throw ConfigError("service " + std::to_string(id) + ": function " + std::to_string(m + 1) +
                        " needs positive scaling and workload");
    }
  }
}

double cumulative_scaling(const ServiceChain& service, int stage) {
  if (stage < 1 || stage > service.stages()) {
    throw std::out_of_range("stage " + std::to_string(stage) + " outside service " +
                            std::to_string(service.id));
  }
  double product = 1.0;
  for (int s = 1; s < stage; ++s) product *= service.scaling[s - 1];
  return product;
}

void Commodity::validate() const {
  const std::string name = "commodity " + std::to_string(id);
  if (min_lifetime < 1 || min_lifetime > max_lifetime) throw ConfigError(name + ": invalid lifetime range");
  if (source == destination) throw ConfigError(name + ": source equals destination");
  if (gamma_long < 0.0 || gamma_long > 1.0) throw ConfigError(name + ": gamma_long outside [0,1]");
}

LayeredGraph::LayeredGraph(const PhysicalNetwork& network, const ServiceChain& service)
    : service_id_(service.id), num_stages_(service.stages()) {
  const int stages = num_stages_;
  nodes_.reserve(network.num_nodes() * stages);
  for (const auto& n : network.nodes()) {
    for (int m = 1; m <= stages; ++m) nodes_.push_back({n.id, m});
  }
  out_.resize(nodes_.size());
  in_.resize(nodes_.size());

  auto index_of = [&](std::size_t node_idx, int stage) {
    return static_cast<int>(node_idx) * stages + (stage - 1);
  };

  for (std::size_t li = 0; li < network.num_links(); ++li) {
    const auto& link = network.links()[li];
    const auto from = *network.node_index(link.from);
    const auto to = *network.node_index(link.to);
    for (int m = 1; m <= stages; ++m) {
      edges_.push_back({index_of(from, m), index_of(to, m), EdgeKind::Transmission,
                        static_cast<int>(li), m, 1.0, 1.0, link.cost});
    }
  }
  for (std::size_t ni = 0; ni < network.num_nodes(); ++ni) {
    for (int m = 1; m < stages; ++m) {
      edges_.push_back({index_of(ni, m), index_of(ni, m + 1), EdgeKind::Processing,
                        static_cast<int>(ni), m, service.scaling[m - 1], service.workload[m - 1],
                        network.nodes()[ni].cost});
    }
  }
  std::sort(edges_.begin(), edges_.end(), [](const LayeredEdge& a, const LayeredEdge& b) {
    return std::tie(a.tail, a.head) < std::tie(b.tail, b.head);
  });
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    out_[edges_[e].tail].push_back(static_cast<int>(e));
    in_[edges_[e].head].push_back(static_cast<int>(e));
  }
}

int LayeredGraph::node_index(NodeId node, int stage) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), LayeredNodeKey{node, stage});
  if (it == nodes_.end() || it->node != node || it->stage != stage) return -1;
  return static_cast<int>(it - nodes_.begin());
}

int LayeredGraph::edge_index(int tail, int head) const {
  if (tail < 0 || tail >= static_cast<int>(out_.size())) return -1;
  for (int e : out_[tail]) {
    if (edges_[e].head == head) return e;
  }
  return -1;
}

LayeredGraph build_layered_graph(const PhysicalNetwork& network, const ServiceChain& service) {
  return LayeredGraph(network, service);
}

std::vector<int> map_layered_nodes(const LayeredGraph& from, const LayeredGraph& to) {
  std::vector<int> map(from.num_nodes(), -1);
  for (std::size_t v = 0; v < from.num_nodes(); ++v) {
    const auto& key = from.node(static_cast<int>(v));
    map[v] = to.node_index(key.node, key.stage);
  }
  return map;
}

std::vector<int> map_layered_edges(const LayeredGraph& from, const LayeredGraph& to) {
  const auto nodes = map_layered_nodes(from, to);
  std::vector<int> map(from.num_edges(), -1);
  for (std::size_t e = 0; e < from.num_edges(); ++e) {
    const auto& edge = from.edge(static_cast<int>(e));
    const int tail = nodes[edge.tail];
    const int head = nodes[edge.head];
    if (tail >= 0 && head >= 0) map[e] = to.edge_index(tail, head);
  }
  return map;
}

double beta_weight(const LayeredGraph& graph, const ServiceChain& service, int layered_node) {
  if (layered_node < 0 || layered_node >= static_cast<int>(graph.num_nodes())) {
    throw std::out_of_range("layered node " + std::to_string(layered_node) + " not in graph");
  }
  return 1.0 / cumulative_scaling(service, graph.node(layered_node).stage);
}

OutageResult apply_outage(const PhysicalNetwork& network, std::span<const ServiceChain> services,
                          std::span<const Commodity> commodities, const OutageSpec& spec) {
  std::set<NodeId> failed_nodes(spec.failed_nodes.begin(), spec.failed_nodes.end());
  std::set<std::pair<NodeId, NodeId>> failed_links(spec.failed_links.begin(), spec.failed_links.end());
  for (NodeId n : failed_nodes) {
    if (!network.has_node(n)) throw ConfigError("outage: unknown node " + std::to_string(n));
  }
  for (const auto& [a, b] : failed_links) {
    if (!network.link_index(a, b)) {
      throw ConfigError("outage: unknown link (" + std::to_string(a) + "," + std::to_string(b) + ")");
    }
  }
  for (const auto& c : commodities) {
    if (failed_nodes.contains(c.source) || failed_nodes.contains(c.destination)) {
      throw ConfigError("outage: commodity " + std::to_string(c.id) + " loses its source or destination");
    }
  }

  std::vector<NodeResource> nodes;
  for (const auto& n : network.nodes()) {
    if (!failed_nodes.contains(n.id)) nodes.push_back(n);
  }
  std::vector<Link> links;
  for (const auto& l : network.links()) {
    if (failed_nodes.contains(l.from) || failed_nodes.contains(l.to)) continue;
    if (failed_links.contains({l.from, l.to})) continue;
    links.push_back(l);
  }
  OutageResult result{PhysicalNetwork(std::move(nodes), std::move(links)), {}};
  for (const auto& s : services) result.graphs.emplace_back(result.network, s);
  return result;
}

void UnitSystem::validate() const {
  if (!(packet_bits > 0.0) || !(slot_seconds > 0.0)) throw ConfigError("units: packet size and slot must be positive");
}

double convert_rate(const UnitSystem& units, double value, RateUnit from, RateUnit to) {
  if (from == to) return value;
  const double pkt_per_gbps = units.packets_per_slot_per_gbps();
  const double mbps_per_pkt = units.mbps_per_packet_rate();

  auto family = [](RateUnit u) {
    switch (u) {
      case RateUnit::Gbps:
      case RateUnit::Mbps:
      case RateUnit::PacketsPerSlot:
        return 0;
      case RateUnit::CpuPerMbps:
      case RateUnit::CpuPerPacketRate:
        return 1;
      case RateUnit::CostPerGbps:
      case RateUnit::CostPerPacket:
        return 2;
    }
    return -1;
  };
  if (family(from) != family(to)) throw std::invalid_argument("convert_rate: incompatible unit pair");

  switch (family(from)) {
    case 0: {
      auto to_packets = [&](RateUnit u, double v) {
        if (u == RateUnit::Gbps) return v * pkt_per_gbps;
        if (u == RateUnit::Mbps) return v * pkt_per_gbps / 1e3;
        return v;
      };
      const double packets = to_packets(from, value);
      return packets / to_packets(to, 1.0);
    }
    case 1:
      // CPU per Mbps -> CPU per (packet/slot): one packet/slot is mbps_per_pkt Mbps.
      return from == RateUnit::CpuPerMbps ? value * mbps_per_pkt : value / mbps_per_pkt;
    default:
      // Cost per Gbps-slot -> cost per packet.
      return from == RateUnit::CostPerGbps ? value / pkt_per_gbps : value * pkt_per_gbps;
  }
}

}  // namespace cnc
