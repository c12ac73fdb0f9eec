#pragma once

// Per-slot orchestration of the controller and trial execution.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cnc/capacity_adaptation.hpp"
#include "cnc/control_view.hpp"
#include "cnc/flow_matching.hpp"
#include "cnc/lp.hpp"
#include "cnc/model.hpp"
#include "cnc/queueing.hpp"
#include "cnc/traffic.hpp"
#include "cnc/virtual_controller.hpp"

namespace cnc {

// Everything in canonical units (packets per slot, CPU, cost per unit).
struct Scenario {
  PhysicalNetwork network;
  std::vector<ServiceChain> services;
  std::vector<Commodity> commodities;
  std::vector<ArrivalEntry> arrivals;
  OutageSpec outage;

  void validate() const;
};

enum class PolicyVariant : std::uint8_t { ResRCNC, RCNCBaseline };

const char* variant_name(PolicyVariant v);
PolicyVariant parse_variant(const std::string& name);

struct PolicyConfig {
  PolicyVariant variant = PolicyVariant::ResRCNC;
  std::int64_t frame_length = 2000;
  int lookahead = 2;
  double v_raw = 5.0;
  std::int64_t forget_window = 500;
  double threshold_link = 1000.0;
  double threshold_node = 0.1;
  double kappa = 0.5;
  double capacity_floor = 0.01;
  std::int64_t horizon = 100000;
  InflowScaling inflow = InflowScaling::Scaled;

  void validate() const;
};

struct CapacitySnapshot {
  std::int64_t t = 0;  // last slot of the frame
  std::vector<std::pair<NodeId, NodeId>> link_ids;
  std::vector<double> links;
  std::vector<NodeId> node_ids;
  std::vector<double> nodes;
};

// Per-slot aggregates; per-commodity series are stored slot-major
// (index t * commodities + c).
struct TrialTrace {
  std::size_t commodities = 0;
  std::int64_t slots = 0;
  std::vector<double> final_scaling;  // Xi per commodity
  std::int64_t outage_time = -1;
  std::vector<double> arrivals;    // exogenous packets a(t)
  std::vector<double> deliveries;  // destination-stage packets delivered in t
  std::vector<double> expired;
  std::vector<double> cost;        // h(t)
  std::vector<double> virtual_queue_total;
  std::vector<double> request_norm;  // sum |R|
  std::vector<double> backlog;       // sum Q
  std::vector<CapacitySnapshot> capacities;

  double at(const std::vector<double>& series, std::int64_t t, std::size_t c) const {
    return series[static_cast<std::size_t>(t) * commodities + c];
  }
};

struct TrialResult {
  std::uint64_t seed = 0;
  PenaltyConfig penalty;
  TrialTrace trace;
  std::vector<ConservationLedger> conservation;  // per commodity, at the end
  std::vector<QueueCounters> counters;
  // Cumulative virtual and actual flow on the final graphs.
  std::vector<LayeredGraph> final_graphs;  // per service
  std::vector<int> commodity_service;      // index into final_graphs
  EdgeTables nu_cumulative;
  EdgeTables x_cumulative;
  EdgeTables requests;
  Capacities final_capacities;  // actual capacities of the final topology
  std::size_t admissibility_checks = 0;
  double worst_availability = 0.0;
  double worst_capacity = 0.0;
  std::int64_t lp_iterations = 0;
  std::size_t lp_max_variables = 0;
  std::size_t lp_max_rows = 0;
};

// Hook for instrumentation: called with an event name and the slot.
using EngineObserver = std::function<void(const std::string&, std::int64_t)>;

class Engine {
 public:
  Engine(const Scenario& scenario, const PolicyConfig& config, std::uint64_t seed,
         std::unique_ptr<LpSolver> solver = nullptr);
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  void step();
  std::int64_t time() const { return t_; }
  TrialResult finish();

  void set_observer(EngineObserver observer) { observer_ = std::move(observer); }

  const ControlView& view() const { return view_; }
  const Capacities& virtual_capacities() const { return virtual_caps_; }
  const Capacities& actual_capacities() const { return actual_caps_; }
  const NodeTables& queues() const { return queues_; }
  const VirtualQueueState& virtual_queues() const { return U_; }
  const EdgeTables& requests() const { return requests_; }
  const EdgeTables& last_virtual_flow() const { return last_nu_; }
  const EdgeTables& last_flow() const { return last_x_; }
  const EdgeTables& cumulative_virtual_flow() const { return nu_cum_; }
  const EdgeTables& cumulative_flow() const { return x_cum_; }
  const FrameState& frame() const { return frame_; }
  const PenaltyConfig& penalty() const { return penalty_; }
  // The LP that step() would build for the current slot.
  FlowMatchingLp current_lp(bool with_labels) const;

 private:
  void notify(const char* event) const;
  void rebuild_arrival_index();
  NodeTables sample_slot(std::int64_t slot);
  void apply_outage_actions();
  void record_capacities();

  const Scenario& scenario_;
  PolicyConfig config_;
  std::unique_ptr<LpSolver> solver_;
  EngineObserver observer_;

  PhysicalNetwork network_;
  std::vector<LayeredGraph> graphs_;
  ControlView view_;
  PenaltyConfig penalty_;

  ArrivalProcess process_;
  ArrivalStreams streams_;
  std::vector<int> arrival_node_;  // layered index per arrival entry

  NodeTables queues_;
  NodeTables arrivals_now_;
  std::vector<QueueCounters> counters_;
  VirtualQueueState U_;
  EdgeTables requests_;
  EdgeTables nu_mean_;  // baseline only: full-history mean of nu
  std::vector<FadingAverage> fading_;
  FrameState frame_;
  Capacities actual_caps_;
  Capacities virtual_caps_;
  EdgeTables nu_cum_;
  EdgeTables x_cum_;
  EdgeTables last_nu_;
  EdgeTables last_x_;

  std::int64_t t_ = 0;
  TrialResult result_;
};

TrialResult run_trial(const Scenario& scenario, const PolicyConfig& config, std::uint64_t seed);

}  // namespace cnc
