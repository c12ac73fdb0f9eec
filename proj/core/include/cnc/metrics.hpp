#pragma once

// Timely throughput, reliability levels, satisfaction events and region
// membership, all computed from stored traces.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cnc/engine.hpp"

namespace cnc {

using TraceSet = std::vector<const TrialTrace*>;

struct ReliabilitySpec {
  std::vector<double> gamma_long;   // per commodity
  std::vector<double> gamma_short;  // per commodity
  std::int64_t window = 500;        // T_win
  std::int64_t recover = 4000;      // T_recover, slots after the outage
  std::vector<double> p_resil;      // per commodity

  static ReliabilitySpec uniform(std::size_t commodities, double gamma_long, double gamma_short,
                                 std::int64_t window, std::int64_t recover, double p_resil);
  void validate(std::size_t commodities) const;
};

// Mean deliveries per slot over [t, t + T - 1].
double short_term_throughput(const TrialTrace& trace, std::size_t c, std::int64_t t, std::int64_t T);
// Mean exogenous arrivals per slot over [t, t + T - 1].
double arrival_rate(const TrialTrace& trace, std::size_t c, std::int64_t t, std::int64_t T);
// Throughput over Xi times the arrival rate; empty when the window saw no arrivals.
std::optional<double> reliability_level(const TrialTrace& trace, std::size_t c, std::int64_t t, std::int64_t T);
// Trailing window [t - T_win + 1, t]; true for a window without arrivals.
bool satisfaction_event(const TrialTrace& trace, std::size_t c, std::int64_t t, const ReliabilitySpec& spec);

struct Proportion {
  double p = 0.0;
  double sigma = 0.0;  // sample standard deviation of the indicators
  std::size_t n = 0;
};

Proportion estimate_p_relia(const TraceSet& traces, std::size_t c, std::int64_t t, const ReliabilitySpec& spec);

struct ResilienceResult {
  bool member = false;
  std::int64_t t_recover = 0;
  std::vector<double> p_at_recover;  // per commodity
  std::vector<double> worst_after;   // min of p over [t_recover, horizon)
};

ResilienceResult resilience_membership(const TraceSet& traces, const ReliabilitySpec& spec);

enum class Phase : std::uint8_t { PreOutage, PostOutage };

struct ReliabilityResult {
  bool member = false;
  std::vector<double> level;  // sample mean over traces, per commodity
};

ReliabilityResult reliability_membership(const TraceSet& traces, const ReliabilitySpec& spec, Phase phase);

// Mean of h(t) over [t, t + T - 1].
double cost_metrics(const TrialTrace& trace, std::size_t c, std::int64_t t, std::int64_t T);

// Prefix sums over one trace, for O(1) window queries.
class TracePrefix {
 public:
  explicit TracePrefix(const TrialTrace& trace);
  std::int64_t slots() const { return slots_; }
  double arrivals(std::size_t c, std::int64_t t, std::int64_t T) const { return window(arr_, c, t, T); }
  double deliveries(std::size_t c, std::int64_t t, std::int64_t T) const { return window(del_, c, t, T); }
  double cost(std::size_t c, std::int64_t t, std::int64_t T) const { return window(cost_, c, t, T); }
  // NaN when the window saw no arrivals.
  double level(std::size_t c, std::int64_t t, std::int64_t T) const;

 private:
  double window(const std::vector<double>& prefix, std::size_t c, std::int64_t t, std::int64_t T) const;

  std::size_t commodities_ = 0;
  std::int64_t slots_ = 0;
  std::vector<double> xi_;
  std::vector<double> arr_, del_, cost_;  // (slots + 1) x commodities
};

enum class SeriesKind : std::uint8_t {
  CumulativeLevel,       // level over [0, t]
  ShortTermLevel,        // level over the trailing window
  CumulativeThroughput,  // deliveries per slot over [0, t]
  CumulativeCost,        // h per slot over [0, t]
  ShortTermThroughput,
  ShortTermCost,
};

const char* series_name(SeriesKind kind);

struct Band {
  std::vector<std::int64_t> t;
  std::vector<double> mean;
  std::vector<double> sigma;  // sample standard deviation; 0 for one trace
};

// Ensemble mean and spread sampled every `stride` slots (always including
// the last slot). NaN entries of single traces are skipped.
Band ensemble_band(const std::vector<TracePrefix>& traces, std::size_t c, SeriesKind kind, std::int64_t window,
                   std::int64_t stride);

struct MatchingEntry {
  std::size_t commodity = 0;
  int edge = -1;  // index into the final layered graph
  int lifetime = 0;
  double nu = 0.0;  // cumulative virtual flow
  double x = 0.0;   // cumulative actual flow
  double ratio = 0.0;
};

struct MatchingReport {
  std::size_t entries = 0;
  std::size_t violations = 0;  // entries with ratio >= bound
  MatchingEntry worst;
};

// |sum nu - sum x| / (sum nu + eps) over every (commodity, edge, lifetime) of
// the final graphs, with eps one slot of the edge's actual capacity.
MatchingReport matching_report(const TrialResult& result, double bound);

// "c1 7_2->7_3 l1" style label for an entry of a layered graph.
std::string matching_label(const LayeredGraph& graph, std::size_t commodity, int edge, int lifetime);

}  // namespace cnc
