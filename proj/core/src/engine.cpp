#include "cnc/engine.hpp"

#include <cmath>
#include <set>

namespace cnc {

void Scenario::validate() const {
  for (const auto& s : services) s.validate();
  std::set<int> ids;
  for (const auto& c : commodities) {
    c.validate();
    if (!ids.insert(c.id).second) throw ConfigError("duplicate commodity id " + std::to_string(c.id));
    if (c.service < 0 || static_cast<std::size_t>(c.service) >= services.size()) {
      throw ConfigError("commodity " + std::to_string(c.id) + ": unknown service");
    }
    if (!network.has_node(c.source) || !network.has_node(c.destination)) {
      throw ConfigError("commodity " + std::to_string(c.id) + ": source or destination not in network");
    }
  }
  for (const auto& a : arrivals) {
    if (a.commodity < 0 || static_cast<std::size_t>(a.commodity) >= commodities.size()) {
      throw ConfigError("arrival entry references an unknown commodity");
    }
    const auto& c = commodities[a.commodity];
    if (a.node != c.source) {
      throw ConfigError("commodity " + std::to_string(c.id) + ": arrivals must enter at the source");
    }
    if (a.lifetime < c.min_lifetime || a.lifetime > c.max_lifetime) {
      throw ConfigError("commodity " + std::to_string(c.id) + ": arrival lifetime outside its range");
    }
    if (a.rate < 0.0 || a.rate_after < 0.0) throw ConfigError("arrival rates must be non-negative");
  }
  if (outage.arrival_scale < 0.0) throw ConfigError("outage arrival scale must be non-negative");
}

const char* variant_name(PolicyVariant v) {
  return v == PolicyVariant::ResRCNC ? "resrcnc" : "rcnc";
}

PolicyVariant parse_variant(const std::string& name) {
  if (name == "resrcnc" || name == "mc-resrcnc") return PolicyVariant::ResRCNC;
  if (name == "rcnc" || name == "mc-rcnc" || name == "baseline") return PolicyVariant::RCNCBaseline;
  throw ConfigError("unknown policy variant '" + name + "'");
}

void PolicyConfig::validate() const {
  if (frame_length < 1) throw ConfigError("policy: frame length K must be at least 1");
  if (lookahead < 1) throw ConfigError("policy: look-ahead n must be at least 1");
  if (forget_window < 1) throw ConfigError("policy: T_forget must be at least 1");
  if (v_raw < 0.0) throw ConfigError("policy: V' must be non-negative");
  if (horizon < 0) throw ConfigError("policy: horizon must be non-negative");
  if (capacity_floor < 0.0 || capacity_floor > 1.0) throw ConfigError("policy: capacity floor outside [0,1]");
  if (variant == PolicyVariant::RCNCBaseline && !(kappa > 0.0 && kappa <= 1.0)) {
    throw ConfigError("policy: baseline kappa must lie in (0,1]");
  }
}

Engine::Engine(const Scenario& scenario, const PolicyConfig& config, std::uint64_t seed,
               std::unique_ptr<LpSolver> solver)
    : scenario_(scenario),
      config_(config),
      solver_(solver ? std::move(solver) : make_default_solver()),
      network_(scenario.network),
      process_(scenario.arrivals),
      streams_(seed, scenario.commodities.size()) {
  scenario_.validate();
  config_.validate();
  for (const auto& s : scenario_.services) graphs_.emplace_back(network_, s);
  view_ = ControlView(network_, graphs_, scenario_.services, scenario_.commodities);
  penalty_ = choose_V(view_, config_.v_raw);
  rebuild_arrival_index();

  const std::size_t C = view_.num_commodities();
  counters_.assign(C, {});
  U_ = make_virtual_queues(view_);
  requests_ = view_.edge_tables();
  nu_mean_ = view_.edge_tables();
  nu_cum_ = view_.edge_tables();
  x_cum_ = view_.edge_tables();
  last_nu_ = view_.edge_tables();
  last_x_ = view_.edge_tables();
  for (const auto& cv : view_.commodities()) {
    fading_.emplace_back(cv.graph->num_nodes(), cv.max_lifetime, config_.forget_window);
  }
  frame_ = make_frame_state(view_, config_.frame_length);
  actual_caps_ = Capacities::actual(network_);
  virtual_caps_ = actual_caps_;

  result_.seed = seed;
  result_.penalty = penalty_;
  auto& tr = result_.trace;
  tr.commodities = C;
  for (const auto& cv : view_.commodities()) tr.final_scaling.push_back(cv.final_scaling);
  tr.outage_time = scenario_.outage.enabled() ? scenario_.outage.time : -1;
  const auto reserve = static_cast<std::size_t>(config_.horizon);
  for (auto* v : {&tr.arrivals, &tr.deliveries, &tr.expired, &tr.cost}) v->reserve(reserve * C);
  for (auto* v : {&tr.virtual_queue_total, &tr.request_norm, &tr.backlog}) v->reserve(reserve);

  // Q(0) = a(0).
  arrivals_now_ = sample_slot(0);
  queues_ = view_.node_tables();
  for (std::size_t c = 0; c < C; ++c) {
    queues_[c] = arrivals_now_[c];
    const auto& cv = view_.commodity(c);
    for (std::size_t v = 0; v < cv.graph->num_nodes(); ++v) {
      const double a = arrivals_now_[c].row_sum(v);
      counters_[c].arrived += a;
      counters_[c].arrived_mass += a * cv.beta[v];
    }
  }
}

void Engine::notify(const char* event) const {
  if (observer_) observer_(event, t_);
}

void Engine::rebuild_arrival_index() {
  arrival_node_.clear();
  for (const auto& e : process_.entries()) {
    const int v = view_.commodity(static_cast<std::size_t>(e.commodity)).graph->node_index(e.node, 1);
    if (v < 0) throw SimulationError("arrival node " + std::to_string(e.node) + " is not in the network");
    arrival_node_.push_back(v);
  }
}

NodeTables Engine::sample_slot(std::int64_t slot) {
  const auto& o = scenario_.outage;
  if (o.enabled() && slot >= o.time && !process_.post_outage()) process_.switch_to_post_outage();
  NodeTables a = view_.node_tables();
  const auto draws = sample_arrivals(process_, streams_);
  const auto entries = process_.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    a[static_cast<std::size_t>(entries[i].commodity)].at(arrival_node_[i], entries[i].lifetime) += draws[i];
  }
  return a;
}

void Engine::apply_outage_actions() {
  notify("outage-topology");
  const PhysicalNetwork old_network = network_;
  const std::vector<LayeredGraph> old_graphs = graphs_;
  const ControlView old_view(old_network, old_graphs, scenario_.services, scenario_.commodities);

  auto outcome = apply_outage(network_, scenario_.services, scenario_.commodities, scenario_.outage);
  network_ = std::move(outcome.network);
  graphs_ = std::move(outcome.graphs);
  view_ = ControlView(network_, graphs_, scenario_.services, scenario_.commodities);

  for (std::size_t c = 0; c < view_.num_commodities(); ++c) {
    const auto& g_old = *old_view.commodity(c).graph;
    const auto& g_new = *view_.commodity(c).graph;
    const auto nodes = map_layered_nodes(g_old, g_new);
    const auto edges = map_layered_edges(g_old, g_new);

    for (std::size_t v = 0; v < nodes.size(); ++v) {
      if (nodes[v] >= 0) continue;
      const double dropped = queues_[c].row_sum(v);
      counters_[c].lost += dropped;
      counters_[c].lost_mass += dropped * old_view.commodity(c).beta[v];
    }
    queues_[c] = remap_rows(queues_[c], nodes, g_new.num_nodes());
    arrivals_now_[c] = remap_rows(arrivals_now_[c], nodes, g_new.num_nodes());
    U_.causality[c] = remap_rows(U_.causality[c], nodes, g_new.num_nodes());
    fading_[c].values() = remap_rows(fading_[c].values(), nodes, g_new.num_nodes());
    for (auto* t : {&requests_, &nu_mean_, &nu_cum_, &x_cum_, &last_nu_, &last_x_}) {
      (*t)[c] = remap_rows((*t)[c], edges, g_new.num_edges());
    }
  }
  actual_caps_ = Capacities::actual(network_);
  if (config_.variant == PolicyVariant::ResRCNC) {
    virtual_caps_ = outage_reset(network_);
    notify("capacity-reset");
    frame_ = redistribute_frame_averages(old_view, frame_, view_, true);
    notify("redistribute");
  } else {
    virtual_caps_ = remap_capacities(old_network, virtual_caps_, network_);
    frame_ = redistribute_frame_averages(old_view, frame_, view_, false);
  }
  rebuild_arrival_index();
  process_.switch_to_post_outage();
  notify("arrival-switch");
}

FlowMatchingLp Engine::current_lp(bool with_labels) const {
  NodeTables abar;
  abar.reserve(fading_.size());
  for (const auto& f : fading_) abar.push_back(f.values());
  FlowMatchingInput in{&view_, &requests_, &queues_, &abar, &actual_caps_, config_.lookahead};
  return build_flow_matching_lp(in, with_labels);
}

void Engine::record_capacities() {
  CapacitySnapshot snap;
  snap.t = t_;
  for (const auto& l : network_.links()) snap.link_ids.emplace_back(l.from, l.to);
  for (const auto& n : network_.nodes()) snap.node_ids.push_back(n.id);
  snap.links = virtual_caps_.links;
  snap.nodes = virtual_caps_.nodes;
  result_.trace.capacities.push_back(std::move(snap));
}

void Engine::step() {
  try {
    const bool baseline = config_.variant == PolicyVariant::RCNCBaseline;
    const std::size_t C = view_.num_commodities();
    if (scenario_.outage.enabled() && t_ == scenario_.outage.time) apply_outage_actions();

    // Virtual flow.
    const auto weights = compute_weights(view_, U_, penalty_.v);
    auto nu = max_weight_assign(view_, weights, virtual_caps_);
    notify("max-weight");

    // Actual flow.
    const auto problem = current_lp(false);
    result_.lp_max_variables = std::max(result_.lp_max_variables, problem.lp.num_variables());
    result_.lp_max_rows = std::max(result_.lp_max_rows, problem.lp.num_rows());
    const auto plan = solve_flow_matching(view_, problem, *solver_);
    result_.lp_iterations += plan.iterations;
    auto x = extract_decision(plan);
    repair_decision(view_, x, queues_, actual_caps_);
    const auto adm = check_admissibility(view_, x, queues_, actual_caps_);
    ++result_.admissibility_checks;
    result_.worst_availability = std::max(result_.worst_availability, adm.worst_availability);
    result_.worst_capacity = std::max(result_.worst_capacity, adm.worst_capacity);
    if (adm.violations > 0) throw SimulationError("executed flow is not admissible");
    notify("flow-matching");

    // Actual queues with a(t+1).
    auto arrivals_next = sample_slot(t_ + 1);
    auto& tr = result_.trace;
    double backlog = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      const auto& cv = view_.commodity(c);
      QueueContext ctx{cv.graph, cv.service, cv.destination, config_.inflow};
      tr.arrivals.push_back(arrivals_now_[c].total());
      tr.cost.push_back(flow_cost(*cv.graph, x[c]));
      const auto outcome = advance_queues(ctx, queues_[c], x[c], arrivals_next[c], counters_[c]);
      tr.deliveries.push_back(outcome.delivered);
      tr.expired.push_back(outcome.expired);
      backlog += queues_[c].total();
    }

    update_virtual_queues(view_, U_, nu, arrivals_now_);

    if (baseline) {
      const double keep = static_cast<double>(t_);
      const double inv = 1.0 / static_cast<double>(t_ + 1);
      for (std::size_t c = 0; c < C; ++c) {
        auto m = nu_mean_[c].raw();
        auto v = nu[c].raw();
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = (keep * m[i] + v[i]) * inv;
      }
      update_request_queues(requests_, nu_mean_, x);
    } else {
      update_request_queues(requests_, nu, x);
    }

    for (std::size_t c = 0; c < C; ++c) fading_[c].update(arrivals_now_[c], t_);
    update_frame_averages(frame_, nu, x, t_);

    if (is_frame_end(t_, config_.frame_length)) {
      const auto eps = compute_reductions(view_, frame_);
      if (baseline) {
        apply_scaled_reduction(virtual_caps_, actual_caps_, eps, config_.kappa, config_.capacity_floor);
      } else {
        apply_capacity_update(virtual_caps_, actual_caps_, eps,
                              {config_.threshold_link, config_.threshold_node, config_.capacity_floor});
      }
      record_capacities();
      notify("capacity-update");
    }

    for (std::size_t c = 0; c < C; ++c) {
      auto n = nu_cum_[c].raw();
      auto xc = x_cum_[c].raw();
      auto v = nu[c].raw();
      auto f = x[c].raw();
      for (std::size_t i = 0; i < n.size(); ++i) {
        n[i] += v[i];
        xc[i] += f[i];
      }
    }
    double rnorm = 0.0;
    for (const auto& r : requests_) {
      for (double v : r.raw()) rnorm += std::abs(v);
    }
    tr.virtual_queue_total.push_back(U_.total());
    tr.request_norm.push_back(rnorm);
    tr.backlog.push_back(backlog);
    ++tr.slots;

    last_nu_ = std::move(nu);
    last_x_ = std::move(x);
    arrivals_now_ = std::move(arrivals_next);
    ++t_;
  } catch (const SimulationError& e) {
    throw SimulationError("slot " + std::to_string(t_) + ": " + e.what());
  }
}

TrialResult Engine::finish() {
  for (std::size_t c = 0; c < view_.num_commodities(); ++c) {
    const auto& cv = view_.commodity(c);
    result_.conservation.push_back(conservation_report(counters_[c], *cv.graph, *cv.service, queues_[c]));
  }
  result_.counters = counters_;
  result_.final_graphs = graphs_;
  for (const auto& c : scenario_.commodities) result_.commodity_service.push_back(c.service);
  result_.nu_cumulative = nu_cum_;
  result_.x_cumulative = x_cum_;
  result_.requests = requests_;
  result_.final_capacities = actual_caps_;
  return std::move(result_);
}

TrialResult run_trial(const Scenario& scenario, const PolicyConfig& config, std::uint64_t seed) {
  Engine engine(scenario, config, seed);
  for (std::int64_t t = 0; t < config.horizon; ++t) engine.step();
  return engine.finish();
}

}  // namespace cnc
