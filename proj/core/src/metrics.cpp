#include "cnc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cnc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_window(const TrialTrace& trace, std::size_t c, std::int64_t t, std::int64_t T) {
  if (c >= trace.commodities) throw SimulationError("commodity index out of range");
  if (T < 1 || t < 0 || t + T > trace.slots) {
    throw SimulationError("window [" + std::to_string(t) + ", " + std::to_string(t + T - 1) +
                          "] outside the trace of " + std::to_string(trace.slots) + " slots");
  }
}

double window_sum(const TrialTrace& trace, const std::vector<double>& series, std::size_t c, std::int64_t t,
                  std::int64_t T) {
  check_window(trace, c, t, T);
  double s = 0.0;
  for (std::int64_t k = t; k < t + T; ++k) s += trace.at(series, k, c);
  return s;
}

double sample_sigma(double sum, double sum_sq, std::size_t n) {
  if (n < 2) return 0.0;
  const double mean = sum / static_cast<double>(n);
  const double var = (sum_sq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

}  // namespace

ReliabilitySpec ReliabilitySpec::uniform(std::size_t commodities, double gamma_long, double gamma_short,
                                         std::int64_t window, std::int64_t recover, double p_resil) {
  ReliabilitySpec s;
  s.gamma_long.assign(commodities, gamma_long);
  s.gamma_short.assign(commodities, gamma_short);
  s.window = window;
  s.recover = recover;
  s.p_resil.assign(commodities, p_resil);
  return s;
}

void ReliabilitySpec::validate(std::size_t commodities) const {
  auto in_unit = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0 && x <= 1.0; });
  };
  if (gamma_long.size() != commodities || gamma_short.size() != commodities || p_resil.size() != commodities) {
    throw ConfigError("reliability spec: one threshold per commodity required");
  }
  if (!in_unit(gamma_long) || !in_unit(gamma_short)) throw ConfigError("reliability spec: gamma outside [0,1]");
  if (!in_unit(p_resil)) throw ConfigError("reliability spec: p_resil outside [0,1]");
  if (window < 1) throw ConfigError("reliability spec: T_win must be at least 1");
  if (recover < 0) throw ConfigError("reliability spec: T_recover must be non-negative");
}

double short_term_throughput(const TrialTrace& trace, std::size_t c, std::int64_t t, std::int64_t T) {
  return window_sum(trace, trace.deliveries, c, t, T) / static_cast<double>(T);
}

double arrival_rate(const TrialTrace& trace, std::size_t c, std::int64_t t, std::int64_t T) {
  return window_sum(trace, trace.arrivals, c, t, T) / static_cast<double>(T);
}

std::optional<double> reliability_level(const TrialTrace& trace, std::size_t c, std::int64_t t, std::int64_t T) {
  const double a = arrival_rate(trace, c, t, T);
  if (!(a > 0.0)) return std::nullopt;
  return short_term_throughput(trace, c, t, T) / (trace.final_scaling.at(c) * a);
}

bool satisfaction_event(const TrialTrace& trace, std::size_t c, std::int64_t t, const ReliabilitySpec& spec) {
  if (t < spec.window - 1) throw SimulationError("satisfaction event needs T_win slots of history");
  const std::int64_t start = t - spec.window + 1;
  const double a = window_sum(trace, trace.arrivals, c, start, spec.window);
  if (!(a > 0.0)) return true;
  const double r = window_sum(trace, trace.deliveries, c, start, spec.window);
  return r >= spec.gamma_short.at(c) * trace.final_scaling.at(c) * a;
}

Proportion estimate_p_relia(const TraceSet& traces, std::size_t c, std::int64_t t, const ReliabilitySpec& spec) {
  Proportion out;
  out.n = traces.size();
  if (traces.empty()) return out;
  double hits = 0.0;
  for (const auto* tr : traces) hits += satisfaction_event(*tr, c, t, spec) ? 1.0 : 0.0;
  out.p = hits / static_cast<double>(out.n);
  out.sigma = sample_sigma(hits, hits, out.n);
  return out;
}

ResilienceResult resilience_membership(const TraceSet& traces, const ReliabilitySpec& spec) {
  if (traces.empty()) throw SimulationError("resilience membership needs at least one trace");
  const auto& first = *traces.front();
  if (first.outage_time < 0) throw SimulationError("resilience membership needs an outage");
  spec.validate(first.commodities);
  ResilienceResult res;
  res.t_recover = first.outage_time + spec.recover;
  std::int64_t horizon = first.slots;
  for (const auto* tr : traces) horizon = std::min(horizon, tr->slots);
  if (res.t_recover >= horizon) {
    throw SimulationError("horizon " + std::to_string(horizon) + " too short for t_recover " +
                          std::to_string(res.t_recover));
  }

  // Prefix sums for the diagnostic scan over [t_recover, horizon).
  std::vector<TracePrefix> prefixes;
  prefixes.reserve(traces.size());
  for (const auto* tr : traces) prefixes.emplace_back(*tr);

  if (res.t_recover < spec.window - 1) throw SimulationError("t_recover precedes the first full window");

  res.member = true;
  for (std::size_t c = 0; c < first.commodities; ++c) {
    const double xi = first.final_scaling.at(c);
    const double at_recover = estimate_p_relia(traces, c, res.t_recover, spec).p;
    double worst = at_recover;
    for (std::int64_t t = res.t_recover + 1; t < horizon; ++t) {
      double hits = 0.0;
      for (const auto& p : prefixes) {
        const std::int64_t s = t - spec.window + 1;
        const double a = p.arrivals(c, s, spec.window);
        const bool ok = !(a > 0.0) || p.deliveries(c, s, spec.window) >= spec.gamma_short[c] * xi * a;
        hits += ok ? 1.0 : 0.0;
      }
      const double prob = hits / static_cast<double>(prefixes.size());
      worst = std::min(worst, prob);
    }
    res.p_at_recover.push_back(at_recover);
    res.worst_after.push_back(worst);
    if (at_recover < spec.p_resil[c]) res.member = false;
  }
  return res;
}

ReliabilityResult reliability_membership(const TraceSet& traces, const ReliabilitySpec& spec, Phase phase) {
  if (traces.empty()) throw SimulationError("reliability membership needs at least one trace");
  const auto& first = *traces.front();
  spec.validate(first.commodities);
  ReliabilityResult res;
  res.member = true;
  for (std::size_t c = 0; c < first.commodities; ++c) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto* tr : traces) {
      const std::int64_t split = tr->outage_time >= 0 ? std::min(tr->outage_time, tr->slots) : tr->slots;
      const std::int64_t begin = phase == Phase::PreOutage ? 0 : split;
      const std::int64_t end = phase == Phase::PreOutage ? split : tr->slots;
      if (end <= begin) throw SimulationError("reliability membership: empty phase window");
      if (auto lvl = reliability_level(*tr, c, begin, end - begin)) {
        sum += *lvl;
        ++n;
      }
    }
    const double mean = n > 0 ? sum / static_cast<double>(n) : kNaN;
    res.level.push_back(mean);
    // A phase without any arrivals cannot violate the requirement.
    if (n > 0 && mean < spec.gamma_long[c]) res.member = false;
  }
  return res;
}

double cost_metrics(const TrialTrace& trace, std::size_t c, std::int64_t t, std::int64_t T) {
  return window_sum(trace, trace.cost, c, t, T) / static_cast<double>(T);
}

TracePrefix::TracePrefix(const TrialTrace& trace)
    : commodities_(trace.commodities), slots_(trace.slots), xi_(trace.final_scaling) {
  const std::size_t C = commodities_;
  const auto n = static_cast<std::size_t>(slots_ + 1) * C;
  arr_.assign(n, 0.0);
  del_.assign(n, 0.0);
  cost_.assign(n, 0.0);
  for (std::int64_t t = 0; t < slots_; ++t) {
    const auto row = static_cast<std::size_t>(t) * C;
    for (std::size_t c = 0; c < C; ++c) {
      arr_[row + C + c] = arr_[row + c] + trace.arrivals[row + c];
      del_[row + C + c] = del_[row + c] + trace.deliveries[row + c];
      cost_[row + C + c] = cost_[row + c] + trace.cost[row + c];
    }
  }
}

double TracePrefix::window(const std::vector<double>& prefix, std::size_t c, std::int64_t t,
                           std::int64_t T) const {
  if (c >= commodities_ || T < 1 || t < 0 || t + T > slots_) throw SimulationError("window outside the trace");
  const auto hi = static_cast<std::size_t>(t + T) * commodities_ + c;
  const auto lo = static_cast<std::size_t>(t) * commodities_ + c;
  return prefix[hi] - prefix[lo];
}

double TracePrefix::level(std::size_t c, std::int64_t t, std::int64_t T) const {
  const double a = arrivals(c, t, T);
  if (!(a > 0.0)) return kNaN;
  return deliveries(c, t, T) / (xi_.at(c) * a);
}

const char* series_name(SeriesKind kind) {
  switch (kind) {
    case SeriesKind::CumulativeLevel: return "cumulative_level";
    case SeriesKind::ShortTermLevel: return "short_term_level";
    case SeriesKind::CumulativeThroughput: return "cumulative_throughput";
    case SeriesKind::CumulativeCost: return "cumulative_cost";
    case SeriesKind::ShortTermThroughput: return "short_term_throughput";
    case SeriesKind::ShortTermCost: return "short_term_cost";
  }
  return "unknown";
}

Band ensemble_band(const std::vector<TracePrefix>& traces, std::size_t c, SeriesKind kind, std::int64_t window,
                   std::int64_t stride) {
  Band band;
  if (traces.empty()) return band;
  if (stride < 1) throw ConfigError("band stride must be at least 1");
  std::int64_t slots = traces.front().slots();
  for (const auto& p : traces) slots = std::min(slots, p.slots());

  auto value = [&](const TracePrefix& p, std::int64_t t) {
    const bool cumulative = kind == SeriesKind::CumulativeLevel || kind == SeriesKind::CumulativeThroughput ||
                            kind == SeriesKind::CumulativeCost;
    const std::int64_t start = cumulative ? 0 : std::max<std::int64_t>(0, t - window + 1);
    const std::int64_t T = t - start + 1;
    switch (kind) {
      case SeriesKind::CumulativeLevel:
      case SeriesKind::ShortTermLevel: return p.level(c, start, T);
      case SeriesKind::CumulativeThroughput:
      case SeriesKind::ShortTermThroughput: return p.deliveries(c, start, T) / static_cast<double>(T);
      case SeriesKind::CumulativeCost:
      case SeriesKind::ShortTermCost: return p.cost(c, start, T) / static_cast<double>(T);
    }
    return kNaN;
  };

  for (std::int64_t t = 0; t < slots; t += stride) {
    band.t.push_back(t);
    if (t + stride >= slots && t != slots - 1) band.t.push_back(slots - 1);
  }
  for (std::int64_t t : band.t) {
    double sum = 0.0, sum_sq = 0.0;
    std::size_t n = 0;
    for (const auto& p : traces) {
      const double v = value(p, t);
      if (std::isnan(v)) continue;
      sum += v;
      sum_sq += v * v;
      ++n;
    }
    band.mean.push_back(n > 0 ? sum / static_cast<double>(n) : kNaN);
    band.sigma.push_back(sample_sigma(sum, sum_sq, n));
  }
  return band;
}

}  // namespace cnc

namespace cnc {

MatchingReport matching_report(const TrialResult& result, double bound) {
  MatchingReport rep;
  rep.worst.ratio = -1.0;
  for (std::size_t c = 0; c < result.nu_cumulative.size(); ++c) {
    const auto& nu = result.nu_cumulative[c];
    const auto& x = result.x_cumulative[c];
    const LayeredGraph* g = &result.final_graphs.at(static_cast<std::size_t>(result.commodity_service.at(c)));
    for (std::size_t e = 0; e < nu.rows(); ++e) {
      const auto& edge = g->edge(static_cast<int>(e));
      const double cap = edge.kind == EdgeKind::Transmission ? result.final_capacities.links.at(edge.resource)
                                                             : result.final_capacities.nodes.at(edge.resource) / edge.rho;
      for (int l = 1; l <= nu.max_lifetime(); ++l) {
        const double n = nu.at(e, l), a = x.at(e, l);
        const double ratio = std::abs(n - a) / (n + cap);
        ++rep.entries;
        if (ratio >= bound) ++rep.violations;
        if (ratio > rep.worst.ratio) rep.worst = {c, static_cast<int>(e), l, n, a, ratio};
      }
    }
  }
  return rep;
}

std::string matching_label(const LayeredGraph& graph, std::size_t commodity, int edge, int lifetime) {
  const auto& e = graph.edge(edge);
  const auto& tail = graph.node(e.tail);
  const auto& head = graph.node(e.head);
  return "c" + std::to_string(commodity + 1) + " " + std::to_string(tail.node) + "_" + std::to_string(tail.stage) +
         "->" + std::to_string(head.node) + "_" + std::to_string(head.stage) + " l" + std::to_string(lifetime);
}

}  // namespace cnc
