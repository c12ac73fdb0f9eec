#pragma once

// Scenario configuration in paper units (Gbps, CPU, ms, kbit) with
// conversion to the canonical units used by the engine.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cnc/engine.hpp"

namespace cnc {

struct NodeConfig {
  NodeId id = 0;
  double cpu = 0.0;
  double cost_per_cpu = 0.0;
};

struct LinkConfig {
  NodeId from = 0;
  NodeId to = 0;
  double capacity_gbps = 0.0;
  double cost_per_gbps = 0.0;
  bool bidirectional = false;
};

struct ServiceConfig {
  int id = 0;
  std::string name;
  std::vector<std::string> functions;
  std::vector<double> scaling;
  std::vector<double> workload_cpu_per_mbps;
};

enum class RateMode : std::uint8_t { PerLifetime, Aggregate };

struct CommodityConfig {
  int id = 0;
  int service = 0;  // service id
  NodeId source = 0;
  NodeId destination = 0;
  int min_lifetime = 1;
  int max_lifetime = 1;
  double rate_gbps = 0.0;
  double gamma_long = 0.9;
};

struct OutageConfig {
  std::int64_t time = -1;
  std::vector<NodeId> failed_nodes;
  std::vector<std::pair<NodeId, NodeId>> failed_links;
  double arrival_scale = 1.0;
};

struct ExperimentConfig {
  std::int64_t horizon = 100000;
  int trials = 128;
  std::uint64_t master_seed = 1;
  std::int64_t window = 500;  // T_win
  double gamma_short = 0.9;
  std::int64_t recover = 4000;  // T_recover
  double p_resil = 0.9;
};

struct ScenarioConfig {
  std::string name = "scenario";
  UnitSystem units;
  std::vector<NodeConfig> nodes;
  std::vector<LinkConfig> links;
  std::vector<ServiceConfig> services;
  std::vector<CommodityConfig> commodities;
  RateMode rate_mode = RateMode::PerLifetime;
  OutageConfig outage;
  PolicyConfig policy;
  ExperimentConfig experiment;

  void validate() const;
};

ScenarioConfig builtin_abilene();

std::string to_json_text(const ScenarioConfig& config);
ScenarioConfig from_json_text(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);
void save_config(const ScenarioConfig& config, const std::filesystem::path& path);

// FNV-1a over the canonical JSON form, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

struct Overrides {
  std::optional<int> trials;
  std::optional<std::int64_t> horizon;
  std::optional<std::int64_t> outage_at;
  std::optional<double> lambda_scale;  // post-outage arrival scale
  std::optional<PolicyVariant> variant;
  std::optional<std::uint64_t> seed;
};

ScenarioConfig apply_overrides(ScenarioConfig config, const Overrides& overrides);

Scenario build_scenario(const ScenarioConfig& config);

}  // namespace cnc
