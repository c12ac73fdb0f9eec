#include "cnc/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cnc {

using nlohmann::json;

namespace {

// Field access with path-qualified diagnostics.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const char* key) const { return node_.contains(key); }

  template <typename T>
  T get(const char* key) const {
    if (!node_.contains(key)) throw ConfigError(where(key) + ": missing");
    return convert<T>(node_.at(key), where(key));
  }

  template <typename T>
  T get_or(const char* key, T fallback) const {
    return node_.contains(key) ? convert<T>(node_.at(key), where(key)) : fallback;
  }

  const json& array(const char* key, bool required = true) const {
    static const json empty = json::array();
    if (!node_.contains(key)) {
      if (required) throw ConfigError(where(key) + ": missing");
      return empty;
    }
    const auto& v = node_.at(key);
    if (!v.is_array()) throw ConfigError(where(key) + ": expected an array");
    return v;
  }

  Reader child(const char* key) const {
    static const json empty = json::object();
    return node_.contains(key) ? Reader(node_.at(key), where(key)) : Reader(empty, where(key));
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  template <typename T>
  static T convert(const json& v, const std::string& path) {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ConfigError(path + ": expected a number");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(path + ": expected a boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(path + ": expected a string");
      }
      return v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }

 private:
  const json& node_;
  std::string path_;
};

std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const char* rate_mode_name(RateMode m) { return m == RateMode::PerLifetime ? "per_lifetime" : "aggregate"; }

RateMode parse_rate_mode(const std::string& s, const std::string& path) {
  if (s == "per_lifetime") return RateMode::PerLifetime;
  if (s == "aggregate") return RateMode::Aggregate;
  throw ConfigError(path + ": expected 'per_lifetime' or 'aggregate'");
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["units"] = {{"packet_bits", c.units.packet_bits}, {"slot_ms", c.units.slot_seconds * 1e3}};
  j["nodes"] = json::array();
  for (const auto& n : c.nodes) j["nodes"].push_back({{"id", n.id}, {"cpu", n.cpu}, {"cost_per_cpu", n.cost_per_cpu}});
  j["links"] = json::array();
  for (const auto& l : c.links) {
    j["links"].push_back({{"from", l.from},
                          {"to", l.to},
                          {"capacity_gbps", l.capacity_gbps},
                          {"cost_per_gbps", l.cost_per_gbps},
                          {"bidirectional", l.bidirectional}});
  }
  j["services"] = json::array();
  for (const auto& s : c.services) {
    j["services"].push_back({{"id", s.id},
                             {"name", s.name},
                             {"functions", s.functions},
                             {"scaling", s.scaling},
                             {"workload_cpu_per_mbps", s.workload_cpu_per_mbps}});
  }
  j["commodities"] = json::array();
  for (const auto& m : c.commodities) {
    j["commodities"].push_back({{"id", m.id},
                                {"service", m.service},
                                {"source", m.source},
                                {"destination", m.destination},
                                {"lifetimes", {m.min_lifetime, m.max_lifetime}},
                                {"rate_gbps", m.rate_gbps},
                                {"gamma_long", m.gamma_long}});
  }
  j["rate_mode"] = rate_mode_name(c.rate_mode);
  json failed_links = json::array();
  for (const auto& [a, b] : c.outage.failed_links) failed_links.push_back({a, b});
  j["outage"] = {{"time", c.outage.time},
                 {"failed_nodes", c.outage.failed_nodes},
                 {"failed_links", failed_links},
                 {"arrival_scale", c.outage.arrival_scale}};
  const auto& p = c.policy;
  j["policy"] = {{"variant", variant_name(p.variant)},
                 {"frame_length", p.frame_length},
                 {"lookahead", p.lookahead},
                 {"v_raw", p.v_raw},
                 {"forget_window", p.forget_window},
                 {"threshold_link", p.threshold_link},
                 {"threshold_node", p.threshold_node},
                 {"kappa", p.kappa},
                 {"capacity_floor", p.capacity_floor},
                 {"inflow", p.inflow == InflowScaling::Scaled ? "scaled" : "unscaled"}};
  const auto& e = c.experiment;
  j["experiment"] = {{"horizon", e.horizon}, {"trials", e.trials},       {"master_seed", e.master_seed},
                     {"window", e.window},   {"gamma_short", e.gamma_short}, {"recover", e.recover},
                     {"p_resil", e.p_resil}};
  return j;
}

ScenarioConfig from_json(const json& root) {
  ScenarioConfig c;
  Reader r(root, "config");
  c.name = r.get_or<std::string>("name", "scenario");

  const auto units = r.child("units");
  c.units.packet_bits = units.get_or<double>("packet_bits", 1000.0);
  c.units.slot_seconds = units.get_or<double>("slot_ms", 14.0) / 1e3;

  const auto& nodes = r.array("nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    Reader n(nodes[i], index_path("config.nodes", i));
    c.nodes.push_back({n.get<int>("id"), n.get<double>("cpu"), n.get<double>("cost_per_cpu")});
  }
  const auto& links = r.array("links");
  for (std::size_t i = 0; i < links.size(); ++i) {
    Reader l(links[i], index_path("config.links", i));
    c.links.push_back({l.get<int>("from"), l.get<int>("to"), l.get<double>("capacity_gbps"),
                       l.get<double>("cost_per_gbps"), l.get_or<bool>("bidirectional", false)});
  }
  const auto& services = r.array("services");
  for (std::size_t i = 0; i < services.size(); ++i) {
    Reader s(services[i], index_path("config.services", i));
    ServiceConfig sc;
    sc.id = s.get<int>("id");
    sc.name = s.get_or<std::string>("name", "");
    if (s.has("functions")) sc.functions = s.get<std::vector<std::string>>("functions");
    sc.scaling = s.get<std::vector<double>>("scaling");
    sc.workload_cpu_per_mbps = s.get<std::vector<double>>("workload_cpu_per_mbps");
    c.services.push_back(std::move(sc));
  }
  const auto& commodities = r.array("commodities");
  for (std::size_t i = 0; i < commodities.size(); ++i) {
    const auto path = index_path("config.commodities", i);
    Reader m(commodities[i], path);
    CommodityConfig cc;
    cc.id = m.get<int>("id");
    cc.service = m.get<int>("service");
    cc.source = m.get<int>("source");
    cc.destination = m.get<int>("destination");
    const auto lifetimes = m.get<std::vector<int>>("lifetimes");
    if (lifetimes.size() != 2) throw ConfigError(path + ".lifetimes: expected [min, max]");
    cc.min_lifetime = lifetimes[0];
    cc.max_lifetime = lifetimes[1];
    cc.rate_gbps = m.get<double>("rate_gbps");
    cc.gamma_long = m.get_or<double>("gamma_long", 0.9);
    c.commodities.push_back(cc);
  }
  c.rate_mode = parse_rate_mode(r.get_or<std::string>("rate_mode", "per_lifetime"), "config.rate_mode");

  const auto outage = r.child("outage");
  c.outage.time = outage.get_or<std::int64_t>("time", -1);
  if (outage.has("failed_nodes")) c.outage.failed_nodes = outage.get<std::vector<int>>("failed_nodes");
  const auto& fl = outage.array("failed_links", false);
  for (std::size_t i = 0; i < fl.size(); ++i) {
    const auto pair = Reader::convert<std::vector<int>>(fl[i], index_path("config.outage.failed_links", i));
    if (pair.size() != 2) throw ConfigError(index_path("config.outage.failed_links", i) + ": expected [from, to]");
    c.outage.failed_links.emplace_back(pair[0], pair[1]);
  }
  c.outage.arrival_scale = outage.get_or<double>("arrival_scale", 1.0);

  const auto policy = r.child("policy");
  auto& p = c.policy;
  p.variant = parse_variant(policy.get_or<std::string>("variant", "resrcnc"));
  p.frame_length = policy.get_or<std::int64_t>("frame_length", p.frame_length);
  p.lookahead = policy.get_or<int>("lookahead", p.lookahead);
  p.v_raw = policy.get_or<double>("v_raw", p.v_raw);
  p.forget_window = policy.get_or<std::int64_t>("forget_window", p.forget_window);
  p.threshold_link = policy.get_or<double>("threshold_link", p.threshold_link);
  p.threshold_node = policy.get_or<double>("threshold_node", p.threshold_node);
  p.kappa = policy.get_or<double>("kappa", p.kappa);
  p.capacity_floor = policy.get_or<double>("capacity_floor", p.capacity_floor);
  const auto inflow = policy.get_or<std::string>("inflow", "scaled");
  if (inflow != "scaled" && inflow != "unscaled") throw ConfigError("config.policy.inflow: expected 'scaled' or 'unscaled'");
  p.inflow = inflow == "scaled" ? InflowScaling::Scaled : InflowScaling::Unscaled;

  const auto exp = r.child("experiment");
  auto& e = c.experiment;
  e.horizon = exp.get_or<std::int64_t>("horizon", e.horizon);
  e.trials = exp.get_or<int>("trials", e.trials);
  e.master_seed = exp.get_or<std::uint64_t>("master_seed", e.master_seed);
  e.window = exp.get_or<std::int64_t>("window", e.window);
  e.gamma_short = exp.get_or<double>("gamma_short", e.gamma_short);
  e.recover = exp.get_or<std::int64_t>("recover", e.recover);
  e.p_resil = exp.get_or<double>("p_resil", e.p_resil);
  p.horizon = e.horizon;
  c.validate();
  return c;
}

}  // namespace

void ScenarioConfig::validate() const {
  units.validate();
  std::set<NodeId> node_ids;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!node_ids.insert(nodes[i].id).second) {
      throw ConfigError(index_path("config.nodes", i) + ": duplicate node id " + std::to_string(nodes[i].id));
    }
  }
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& l = links[i];
    if (!node_ids.contains(l.from) || !node_ids.contains(l.to)) {
      throw ConfigError(index_path("config.links", i) + ": unknown endpoint");
    }
  }
  std::set<int> service_ids;
  for (const auto& s : services) {
    if (!service_ids.insert(s.id).second) throw ConfigError("config.services: duplicate id " + std::to_string(s.id));
  }
  for (std::size_t i = 0; i < commodities.size(); ++i) {
    const auto& m = commodities[i];
    const auto path = index_path("config.commodities", i) + " (commodity " + std::to_string(m.id) + ")";
    if (!service_ids.contains(m.service)) throw ConfigError(path + ": unknown service " + std::to_string(m.service));
    if (!node_ids.contains(m.source)) throw ConfigError(path + ": unknown source node " + std::to_string(m.source));
    if (!node_ids.contains(m.destination)) {
      throw ConfigError(path + ": unknown destination node " + std::to_string(m.destination));
    }
    if (m.rate_gbps < 0.0) throw ConfigError(path + ": negative rate");
  }
  for (NodeId n : outage.failed_nodes) {
    if (!node_ids.contains(n)) throw ConfigError("config.outage.failed_nodes: unknown node " + std::to_string(n));
  }
  if (outage.arrival_scale < 0.0) throw ConfigError("config.outage.arrival_scale: must be non-negative");
  policy.validate();
  if (experiment.trials < 1) throw ConfigError("config.experiment.trials: must be at least 1");
  if (experiment.window < 1) throw ConfigError("config.experiment.window: must be at least 1");
  if (experiment.gamma_short < 0.0 || experiment.gamma_short > 1.0) {
    throw ConfigError("config.experiment.gamma_short: outside [0,1]");
  }
  if (experiment.p_resil < 0.0 || experiment.p_resil > 1.0) throw ConfigError("config.experiment.p_resil: outside [0,1]");
  if (experiment.recover < 0) throw ConfigError("config.experiment.recover: must be non-negative");
}

ScenarioConfig builtin_abilene() {
  ScenarioConfig c;
  c.name = "abilene";
  for (NodeId id = 1; id <= 11; ++id) c.nodes.push_back({id, 20.0, 0.5});
  const std::pair<NodeId, NodeId> links[] = {{3, 1}, {3, 2}, {1, 4}, {1, 2},  {4, 5},  {2, 6},  {6, 5},
                                             {6, 7}, {5, 10}, {10, 7}, {7, 8}, {8, 9}, {9, 11}, {11, 10}};
  for (const auto& [a, b] : links) c.links.push_back({a, b, 10.0, 1.0, true});
  c.services.push_back({1, "service-1", {"DPI", "IPsec"}, {1.0, 2.3}, {1.0 / 500, 1.0 / 800}});
  c.services.push_back({2, "service-2", {"transrating", "transcoding"}, {1.0 / 3, 1.0 / 2}, {1.0 / 340, 1.0 / 300}});
  const std::pair<NodeId, NodeId> pairs[] = {{1, 7}, {2, 10}, {4, 11}};
  for (int i = 0; i < 6; ++i) {
    const auto [s, d] = pairs[i % 3];
    c.commodities.push_back({i + 1, i < 3 ? 1 : 2, s, d, 6, 7, i < 3 ? 1.64 : 2.46, 0.9});
  }
  c.outage.time = 45000;
  c.outage.failed_nodes = {6};
  c.outage.arrival_scale = 0.75;
  c.policy.frame_length = 2000;
  c.policy.lookahead = 2;
  c.policy.v_raw = 5.0;
  c.policy.forget_window = 500;
  c.policy.threshold_link = 1000.0;
  c.policy.threshold_node = 0.1;
  c.policy.kappa = 0.5;
  c.policy.horizon = 100000;
  c.experiment.horizon = 100000;
  c.experiment.trials = 128;
  c.experiment.window = 500;
  c.experiment.gamma_short = 0.9;
  c.experiment.recover = 4000;
  c.experiment.p_resil = 0.9;
  return c;
}

std::string to_json_text(const ScenarioConfig& config) { return to_json(config).dump(2) + "\n"; }

ScenarioConfig from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  return from_json(root);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

void save_config(const ScenarioConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json_text(config);
}

std::string config_hash(const ScenarioConfig& config) {
  const std::string canonical = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ScenarioConfig apply_overrides(ScenarioConfig config, const Overrides& o) {
  if (o.trials) config.experiment.trials = *o.trials;
  if (o.horizon) {
    config.experiment.horizon = *o.horizon;
    config.policy.horizon = *o.horizon;
  }
  if (o.outage_at) config.outage.time = *o.outage_at;
  if (o.lambda_scale) config.outage.arrival_scale = *o.lambda_scale;
  if (o.variant) config.policy.variant = *o.variant;
  if (o.seed) config.experiment.master_seed = *o.seed;
  config.validate();
  return config;
}

Scenario build_scenario(const ScenarioConfig& config) {
  config.validate();
  const auto& u = config.units;
  std::vector<NodeResource> nodes;
  for (const auto& n : config.nodes) nodes.push_back({n.id, n.cpu, n.cost_per_cpu});
  std::vector<Link> links;
  for (const auto& l : config.links) {
    const double cap = convert_rate(u, l.capacity_gbps, RateUnit::Gbps, RateUnit::PacketsPerSlot);
    const double cost = convert_rate(u, l.cost_per_gbps, RateUnit::CostPerGbps, RateUnit::CostPerPacket);
    links.push_back({l.from, l.to, cap, cost});
    if (l.bidirectional) links.push_back({l.to, l.from, cap, cost});
  }
  Scenario s;
  s.network = PhysicalNetwork(std::move(nodes), std::move(links));

  std::map<int, int> service_index;
  for (const auto& sc : config.services) {
    ServiceChain chain;
    chain.id = sc.id;
    chain.scaling = sc.scaling;
    for (double w : sc.workload_cpu_per_mbps) {
      chain.workload.push_back(convert_rate(u, w, RateUnit::CpuPerMbps, RateUnit::CpuPerPacketRate));
    }
    chain.validate();
    service_index[sc.id] = static_cast<int>(s.services.size());
    s.services.push_back(std::move(chain));
  }
  for (const auto& m : config.commodities) {
    s.commodities.push_back(
        {m.id, service_index.at(m.service), m.source, m.destination, m.min_lifetime, m.max_lifetime, m.gamma_long});
  }
  const bool outage = config.outage.time >= 0;
  for (std::size_t i = 0; i < config.commodities.size(); ++i) {
    const auto& m = config.commodities[i];
    const int classes = m.max_lifetime - m.min_lifetime + 1;
    double rate = convert_rate(u, m.rate_gbps, RateUnit::Gbps, RateUnit::PacketsPerSlot);
    if (config.rate_mode == RateMode::Aggregate) rate /= classes;
    const double after = outage ? rate * config.outage.arrival_scale : rate;
    for (int l = m.min_lifetime; l <= m.max_lifetime; ++l) {
      s.arrivals.push_back({static_cast<int>(i), m.source, l, rate, after});
    }
  }
  s.outage.time = config.outage.time;
  s.outage.failed_nodes = config.outage.failed_nodes;
  s.outage.failed_links = config.outage.failed_links;
  s.outage.arrival_scale = config.outage.arrival_scale;
  s.validate();
  return s;
}

}  // namespace cnc
