#pragma once

// Physical network, service chains, commodities and the layered-graph
// expansion that the controller operates on.
//
// All rates and capacities held by these types are already in canonical
// units: packets per slot for transmission, CPU units for processing budgets,
// cost per packet for links and cost per CPU-slot for nodes. Conversion from
// Gbps / CPU-per-Mbps happens once at config load (see UnitSystem).

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cnc {

using NodeId = int;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NodeResource {
  NodeId id = 0;
  double capacity = 0.0;  // CPU units
  double cost = 0.0;      // cost per CPU unit per slot
};

struct Link {
  NodeId from = 0;
  NodeId to = 0;
  double capacity = 0.0;  // packets per slot
  double cost = 0.0;      // cost per packet
};

class PhysicalNetwork {
 public:
  PhysicalNetwork() = default;
  // Nodes are kept sorted by id; links keep the given order.
  PhysicalNetwork(std::vector<NodeResource> nodes, std::vector<Link> links);

  std::span<const NodeResource> nodes() const { return nodes_; }
  std::span<const Link> links() const { return links_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_links() const { return links_.size(); }

  std::optional<std::size_t> node_index(NodeId id) const;
  std::optional<std::size_t> link_index(NodeId from, NodeId to) const;
  bool has_node(NodeId id) const { return node_index(id).has_value(); }

 private:
  std::vector<NodeResource> nodes_;
  std::vector<Link> links_;
};

struct ServiceChain {
  int id = 0;
  std::vector<double> scaling;   // xi per function, size = stages - 1
  std::vector<double> workload;  // CPU per (packet/slot) of input, size = stages - 1

  int stages() const { return static_cast<int>(scaling.size()) + 1; }
  void validate() const;
};

// Product of the scaling factors of the functions before stage m (1-based).
double cumulative_scaling(const ServiceChain& service, int stage);

struct Commodity {
  int id = 0;
  int service = 0;  // index into the scenario's service list
  NodeId source = 0;
  NodeId destination = 0;
  int min_lifetime = 1;
  int max_lifetime = 1;
  double gamma_long = 0.0;

  void validate() const;
};

enum class EdgeKind : std::uint8_t { Transmission, Processing };

struct LayeredNodeKey {
  NodeId node = 0;
  int stage = 1;
  auto operator<=>(const LayeredNodeKey&) const = default;
};

struct LayeredEdge {
  int tail = 0;  // layered node index
  int head = 0;
  EdgeKind kind = EdgeKind::Transmission;
  // Physical link index for transmission edges, physical node index for
  // processing edges (indices into the network the graph was built from).
  int resource = 0;
  int stage = 1;  // stage of the packets entering the edge
  double zeta = 1.0;
  double rho = 1.0;
  double cost = 0.0;
};

class LayeredGraph {
 public:
  LayeredGraph() = default;
  LayeredGraph(const PhysicalNetwork& network, const ServiceChain& service);

  int service_id() const { return service_id_; }
  int num_stages() const { return num_stages_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  std::span<const LayeredNodeKey> nodes() const { return nodes_; }
  std::span<const LayeredEdge> edges() const { return edges_; }
  const LayeredNodeKey& node(int index) const { return nodes_[index]; }
  const LayeredEdge& edge(int index) const { return edges_[index]; }
  std::span<const int> out_edges(int node) const { return out_[node]; }
  std::span<const int> in_edges(int node) const { return in_[node]; }

  // -1 when the (node, stage) copy does not exist.
  int node_index(NodeId node, int stage) const;
  int edge_index(int tail, int head) const;

 private:
  int service_id_ = 0;
  int num_stages_ = 1;
  std::vector<LayeredNodeKey> nodes_;
  std::vector<LayeredEdge> edges_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

LayeredGraph build_layered_graph(const PhysicalNetwork& network, const ServiceChain& service);

// Old-graph index -> new-graph index (-1 when the element did not survive).
// Elements are matched by physical node id and stage, so the two graphs may
// come from different networks.
std::vector<int> map_layered_nodes(const LayeredGraph& from, const LayeredGraph& to);
std::vector<int> map_layered_edges(const LayeredGraph& from, const LayeredGraph& to);

// 1 / Xi at the stage of the given layered node.
double beta_weight(const LayeredGraph& graph, const ServiceChain& service, int layered_node);

struct OutageSpec {
  std::int64_t time = -1;  // slot index; negative disables the outage
  std::vector<NodeId> failed_nodes;
  std::vector<std::pair<NodeId, NodeId>> failed_links;
  double arrival_scale = 1.0;  // post-outage rate multiplier

  bool enabled() const { return time >= 0; }
};

struct OutageResult {
  PhysicalNetwork network;
  std::vector<LayeredGraph> graphs;  // one per service
};

// Removes failed nodes (with every incident link) and failed links, then
// rebuilds the layered graphs on the surviving topology.
OutageResult apply_outage(const PhysicalNetwork& network, std::span<const ServiceChain> services,
                          std::span<const Commodity> commodities, const OutageSpec& spec);

enum class RateUnit : std::uint8_t {
  Gbps,
  Mbps,
  PacketsPerSlot,
  CpuPerMbps,
  CpuPerPacketRate,
  CostPerGbps,
  CostPerPacket,
};

struct UnitSystem {
  double packet_bits = 1000.0;
  double slot_seconds = 0.014;

  void validate() const;
  double packets_per_slot_per_gbps() const { return slot_seconds * 1e9 / packet_bits; }
  double mbps_per_packet_rate() const { return packet_bits / slot_seconds / 1e6; }
};

double convert_rate(const UnitSystem& units, double value, RateUnit from, RateUnit to);

}  // namespace cnc
