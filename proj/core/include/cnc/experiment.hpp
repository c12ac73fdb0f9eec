#pragma once

// Monte Carlo orchestration and output bundles.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cnc/config.hpp"
#include "cnc/metrics.hpp"

namespace cnc {

struct ExperimentOptions {
  int jobs = 1;
  std::int64_t stride = 0;  // ensemble sampling step; 0 picks about 1000 points
  bool verbose = false;     // record flow-matching overlays for the first trial
  std::function<void(const std::string&)> log;
};

// Cumulative virtual and actual flow of selected (commodity, edge, lifetime)
// entries over time, for the first trial.
struct FlowOverlay {
  std::vector<std::string> labels;
  std::vector<std::int64_t> t;
  std::vector<std::vector<double>> nu;  // [entry][sample]
  std::vector<std::vector<double>> x;
};

struct ExperimentResult {
  ScenarioConfig config;
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
  std::vector<TrialResult> trials;  // ordered by seed index
  double wall_seconds = 0.0;
  std::optional<FlowOverlay> overlay;

  TraceSet traces() const;
};

std::vector<std::uint64_t> trial_seeds(std::uint64_t master_seed, int trials);

// Runs config.experiment.trials trials on a pool of options.jobs workers.
ExperimentResult run_experiment(const ScenarioConfig& config, const ExperimentOptions& options = {});

std::int64_t default_stride(std::int64_t horizon);

struct EnsembleTable {
  std::vector<std::int64_t> t;
  std::vector<std::string> columns;         // excluding t
  std::vector<std::vector<double>> values;  // [column][row]
};

EnsembleTable ensemble_table(const TraceSet& traces, std::int64_t window, std::int64_t stride);
void write_ensemble_csv(std::ostream& os, const EnsembleTable& table);

// Writes manifest.json, config.json, trials/, ensemble.csv, capacities.csv
// and plots/ under `out`.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& out,
                      const ExperimentOptions& options = {});

struct RegionAxes {
  std::vector<double> lambda_o{0.75};
  std::vector<double> gamma_long;   // empty: the config value
  std::vector<double> gamma_short;
  std::vector<std::int64_t> recover;
  std::vector<double> p_resil;
};

// Parses "name=v1,v2,..." with name in lambda_o, gamma_long, gamma_short,
// t_recover, p_resil.
void parse_sweep(const std::string& text, RegionAxes& axes);

struct RegionRow {
  double lambda_o = 0.0;
  double gamma_long = 0.0;
  double gamma_short = 0.0;
  std::int64_t recover = 0;
  double p_resil = 0.0;
  bool pre_member = false;
  bool post_member = false;
  bool resilience_member = false;
  std::vector<double> pre_level;
  std::vector<double> post_level;
  std::vector<double> p_at_recover;
  std::vector<double> worst_p;
};

// Threshold-only axes are evaluated on the same traces.
std::vector<RegionRow> evaluate_region(const TraceSet& traces, double lambda_o, const RegionAxes& axes,
                                       const ExperimentConfig& defaults, double default_gamma_long);
std::vector<RegionRow> run_region(const ScenarioConfig& config, const RegionAxes& axes,
                                  const ExperimentOptions& options = {});
void write_region_csv(std::ostream& os, const std::vector<RegionRow>& rows);

// Same seeds for every variant; writes one bundle per variant plus
// compare.csv and overlay plots.
void run_compare(const ScenarioConfig& config, const std::vector<PolicyVariant>& variants,
                 const std::filesystem::path& out, const ExperimentOptions& options = {});

}  // namespace cnc
