#include "cnc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cnc/svg_plot.hpp"
#include "cnc/trace_io.hpp"

namespace cnc {

namespace fs = std::filesystem;
using nlohmann::json;

TraceSet ExperimentResult::traces() const {
  TraceSet out;
  for (const auto& t : trials) out.push_back(&t.trace);
  return out;
}

std::vector<std::uint64_t> trial_seeds(std::uint64_t master_seed, int trials) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < trials; ++i) {
    seeds.push_back(mix_seed(master_seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(i + 1)));
  }
  return seeds;
}

std::int64_t default_stride(std::int64_t horizon) { return std::max<std::int64_t>(1, horizon / 1000); }

namespace {

struct OverlayRecorder {
  std::int64_t stride = 1;
  struct Snapshot {
    std::int64_t t;
    std::size_t version;
    EdgeTables nu, x;
  };
  std::vector<std::vector<LayeredGraph>> versions;  // per commodity graphs
  std::vector<Snapshot> snapshots;

  void record(const Engine& engine) {
    const auto& view = engine.view();
    bool changed = versions.empty();
    if (!changed) {
      for (std::size_t c = 0; c < view.num_commodities(); ++c) {
        if (view.commodity(c).graph->num_edges() != versions.back()[c].num_edges()) changed = true;
      }
    }
    if (changed) {
      std::vector<LayeredGraph> gs;
      for (std::size_t c = 0; c < view.num_commodities(); ++c) gs.push_back(*view.commodity(c).graph);
      versions.push_back(std::move(gs));
    }
    snapshots.push_back({engine.time(), versions.size() - 1, engine.cumulative_virtual_flow(),
                         engine.cumulative_flow()});
  }

  FlowOverlay finish(std::size_t top) const {
    FlowOverlay ov;
    if (snapshots.empty()) return ov;
    const auto& last = snapshots.back();
    const auto& final_graphs = versions[last.version];
    struct Pick {
      double nu;
      std::size_t c;
      int e, l;
    };
    std::vector<Pick> picks;
    for (std::size_t c = 0; c < last.nu.size(); ++c) {
      for (std::size_t e = 0; e < last.nu[c].rows(); ++e) {
        for (int l = 1; l <= last.nu[c].max_lifetime(); ++l) {
          if (last.nu[c].at(e, l) > 0.0) picks.push_back({last.nu[c].at(e, l), c, static_cast<int>(e), l});
        }
      }
    }
    std::stable_sort(picks.begin(), picks.end(), [](const Pick& a, const Pick& b) { return a.nu > b.nu; });
    if (picks.size() > top) picks.resize(top);

    // Index of each picked final edge inside every earlier graph version.
    std::vector<std::vector<std::vector<int>>> back_maps(versions.size());
    for (std::size_t v = 0; v < versions.size(); ++v) {
      for (std::size_t c = 0; c < final_graphs.size(); ++c) {
        const auto fwd = map_layered_edges(versions[v][c], final_graphs[c]);
        std::vector<int> inv(final_graphs[c].num_edges(), -1);
        for (std::size_t k = 0; k < fwd.size(); ++k) {
          if (fwd[k] >= 0) inv[static_cast<std::size_t>(fwd[k])] = static_cast<int>(k);
        }
        back_maps[v].push_back(std::move(inv));
      }
    }
    for (const auto& p : picks) {
      ov.labels.push_back(matching_label(final_graphs[p.c], p.c, p.e, p.l));
      ov.nu.emplace_back();
      ov.x.emplace_back();
    }
    for (const auto& s : snapshots) {
      ov.t.push_back(s.t);
      for (std::size_t k = 0; k < picks.size(); ++k) {
        const int e = back_maps[s.version][picks[k].c][static_cast<std::size_t>(picks[k].e)];
        ov.nu[k].push_back(e >= 0 ? s.nu[picks[k].c].at(static_cast<std::size_t>(e), picks[k].l) : std::nan(""));
        ov.x[k].push_back(e >= 0 ? s.x[picks[k].c].at(static_cast<std::size_t>(e), picks[k].l) : std::nan(""));
      }
    }
    return ov;
  }
};

TrialResult run_one(const Scenario& scenario, const PolicyConfig& policy, std::uint64_t seed,
                    OverlayRecorder* overlay) {
  Engine engine(scenario, policy, seed);
  for (std::int64_t t = 0; t < policy.horizon; ++t) {
    engine.step();
    if (overlay && (engine.time() % overlay->stride == 0 || engine.time() == policy.horizon)) {
      overlay->record(engine);
    }
  }
  return engine.finish();
}

void log_line(const ExperimentOptions& options, const std::string& msg) {
  if (options.log) options.log(msg);
}

}  // namespace

ExperimentResult run_experiment(const ScenarioConfig& config, const ExperimentOptions& options) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult res;
  res.config = config;
  res.config_hash = config_hash(config);
  res.seeds = trial_seeds(config.experiment.master_seed, config.experiment.trials);
  res.trials.resize(res.seeds.size());

  const Scenario scenario = build_scenario(config);
  PolicyConfig policy = config.policy;
  policy.horizon = config.experiment.horizon;

  OverlayRecorder recorder;
  recorder.stride = std::max<std::int64_t>(1, options.stride > 0 ? options.stride
                                                                 : std::max<std::int64_t>(1, policy.horizon / 400));

  std::vector<std::exception_ptr> errors(res.seeds.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= res.seeds.size()) return;
      try {
        res.trials[i] = run_one(scenario, policy, res.seeds[i], options.verbose && i == 0 ? &recorder : nullptr);
        if (options.log) {
          std::lock_guard lock(log_mutex);
          log_line(options, "trial " + std::to_string(i) + " (seed " + std::to_string(res.seeds[i]) + ") done");
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int jobs = std::clamp(options.jobs, 1, std::max(1, static_cast<int>(res.seeds.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    const std::string prefix = "trial " + std::to_string(i) + " (seed " + std::to_string(res.seeds[i]) + "): ";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const ConfigError& e) {
      throw ConfigError(prefix + e.what());
    } catch (const SimulationError& e) {
      throw SimulationError(prefix + e.what());
    }
  }
  if (options.verbose && !res.trials.empty()) res.overlay = recorder.finish(6);
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

namespace {

constexpr SeriesKind kEnsembleKinds[] = {SeriesKind::CumulativeLevel,      SeriesKind::ShortTermLevel,
                                         SeriesKind::CumulativeThroughput, SeriesKind::ShortTermThroughput,
                                         SeriesKind::CumulativeCost,       SeriesKind::ShortTermCost};

std::vector<TracePrefix> prefixes_of(const TraceSet& traces) {
  std::vector<TracePrefix> out;
  out.reserve(traces.size());
  for (const auto* t : traces) out.emplace_back(*t);
  return out;
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create directory " + p.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw IoError("write failed: " + path.string());
}

template <class F>
void write_stream(const fs::path& path, F&& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  body(os);
  if (!os) throw IoError("write failed: " + path.string());
}

std::vector<double> as_double(const std::vector<std::int64_t>& v) { return {v.begin(), v.end()}; }

void write_plot(const fs::path& path, const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  write_text(path, render_svg(spec, series));
}

std::vector<PlotSeries> band_series(const std::vector<TracePrefix>& prefixes, std::size_t commodities,
                                    SeriesKind kind, std::int64_t window, std::int64_t stride,
                                    const std::string& suffix = "") {
  std::vector<PlotSeries> out;
  for (std::size_t c = 0; c < commodities; ++c) {
    const Band b = ensemble_band(prefixes, c, kind, window, stride);
    out.push_back({"commodity " + std::to_string(c + 1) + suffix, as_double(b.t), b.mean, b.sigma, false});
  }
  return out;
}

std::string variant_label(PolicyVariant v) {
  return v == PolicyVariant::ResRCNC ? "MC-ResRCNC" : "RCNC-style baseline";
}

void write_capacities(const fs::path& dir, const TrialTrace& trace) {
  std::vector<std::pair<NodeId, NodeId>> link_ids;
  std::vector<NodeId> node_ids;
  for (const auto& s : trace.capacities) {
    for (const auto& l : s.link_ids) {
      if (std::find(link_ids.begin(), link_ids.end(), l) == link_ids.end()) link_ids.push_back(l);
    }
    for (NodeId n : s.node_ids) {
      if (std::find(node_ids.begin(), node_ids.end(), n) == node_ids.end()) node_ids.push_back(n);
    }
  }
  std::sort(link_ids.begin(), link_ids.end());
  std::sort(node_ids.begin(), node_ids.end());

  auto link_value = [](const CapacitySnapshot& s, std::pair<NodeId, NodeId> id) {
    for (std::size_t k = 0; k < s.link_ids.size(); ++k) {
      if (s.link_ids[k] == id) return s.links[k];
    }
    return std::nan("");
  };
  auto node_value = [](const CapacitySnapshot& s, NodeId id) {
    for (std::size_t k = 0; k < s.node_ids.size(); ++k) {
      if (s.node_ids[k] == id) return s.nodes[k];
    }
    return std::nan("");
  };

  write_stream(dir / "capacities.csv", [&](std::ostream& os) {
    os << "t";
    for (const auto& [a, b] : link_ids) os << ",link_" << a << '_' << b;
    for (NodeId n : node_ids) os << ",node_" << n;
    os << '\n';
    for (const auto& s : trace.capacities) {
      os << s.t;
      for (const auto& id : link_ids) os << ',' << format_double(link_value(s, id));
      for (NodeId n : node_ids) os << ',' << format_double(node_value(s, n));
      os << '\n';
    }
  });
  if (trace.capacities.empty()) return;

  std::vector<double> t;
  for (const auto& s : trace.capacities) t.push_back(static_cast<double>(s.t));
  std::vector<PlotSeries> links, nodes;
  for (const auto& id : link_ids) {
    PlotSeries ps{"link " + std::to_string(id.first) + "-" + std::to_string(id.second), t, {}, {}, true};
    for (const auto& s : trace.capacities) ps.y.push_back(link_value(s, id));
    // Only links whose capacity ever moved, to keep the legend readable.
    const bool moved = std::any_of(ps.y.begin(), ps.y.end(), [&](double v) { return std::isfinite(v) && v != ps.y.front(); });
    if (moved) links.push_back(std::move(ps));
  }
  for (NodeId n : node_ids) {
    PlotSeries ps{"node " + std::to_string(n), t, {}, {}, true};
    for (const auto& s : trace.capacities) ps.y.push_back(node_value(s, n));
    nodes.push_back(std::move(ps));
  }
  if (links.size() > 8) links.resize(8);
  if (nodes.size() > 8) nodes.resize(8);
  if (!links.empty()) {
    write_plot(dir / "plots" / "capacity_links.svg",
               {"Virtual link capacity (trial 0)", "slot", "packets per slot", {}, {}, {}}, links);
  }
  write_plot(dir / "plots" / "capacity_nodes.svg", {"Virtual node capacity (trial 0)", "slot", "CPU", {}, {}, {}},
             nodes);
}

}  // namespace

EnsembleTable ensemble_table(const TraceSet& traces, std::int64_t window, std::int64_t stride) {
  EnsembleTable table;
  if (traces.empty()) return table;
  const auto prefixes = prefixes_of(traces);
  const std::size_t C = traces.front()->commodities;
  for (std::size_t c = 0; c < C; ++c) {
    for (SeriesKind kind : kEnsembleKinds) {
      const Band b = ensemble_band(prefixes, c, kind, window, stride);
      if (table.t.empty()) table.t = b.t;
      const std::string base = std::string(series_name(kind)) + "_c" + std::to_string(c + 1);
      table.columns.push_back(base + "_mean");
      table.values.push_back(b.mean);
      table.columns.push_back(base + "_sigma");
      table.values.push_back(b.sigma);
    }
  }
  return table;
}

void write_ensemble_csv(std::ostream& os, const EnsembleTable& table) {
  os << "t";
  for (const auto& c : table.columns) os << ',' << c;
  os << '\n';
  for (std::size_t r = 0; r < table.t.size(); ++r) {
    os << table.t[r];
    for (const auto& col : table.values) os << ',' << format_double(col[r]);
    os << '\n';
  }
}

void write_experiment(const ExperimentResult& result, const fs::path& out, const ExperimentOptions& options) {
  ensure_dir(out / "trials");
  ensure_dir(out / "plots");
  const auto& cfg = result.config;
  const auto traces = result.traces();
  const std::int64_t stride = options.stride > 0 ? options.stride : default_stride(cfg.experiment.horizon);
  const std::int64_t window = cfg.experiment.window;

  std::vector<std::string> trial_files;
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "trial_%03zu.csv", i);
    save_trace_csv(out / "trials" / name, result.trials[i].trace, result.seeds[i]);
    trial_files.push_back(std::string("trials/") + name);
  }
  save_config(cfg, out / "config.json");

  json manifest;
  manifest["scenario"] = cfg.name;
  manifest["config_hash"] = result.config_hash;
  manifest["variant"] = variant_name(cfg.policy.variant);
  manifest["variant_label"] = variant_label(cfg.policy.variant);
  if (cfg.policy.variant == PolicyVariant::RCNCBaseline) {
    manifest["request_queue_average"] = "full-history";
    manifest["capacity_rule"] = "kappa-scaled reduction every frame, no outage actions";
  }
  manifest["horizon"] = cfg.experiment.horizon;
  manifest["trials"] = cfg.experiment.trials;
  manifest["master_seed"] = cfg.experiment.master_seed;
  manifest["seeds"] = result.seeds;
  manifest["outage_time"] = cfg.outage.time;
  manifest["lambda_o_scale"] = cfg.outage.arrival_scale;
  manifest["wall_seconds"] = result.wall_seconds;
  manifest["jobs"] = options.jobs;
  if (!result.trials.empty()) {
    const auto& p = result.trials.front().penalty;
    manifest["V"] = p.v;
    manifest["V_raw"] = p.v_raw;
    manifest["C_avg"] = p.c_avg;
    manifest["e_avg"] = p.e_avg;
    json per_trial = json::array();
    for (std::size_t i = 0; i < result.trials.size(); ++i) {
      const auto& tr = result.trials[i];
      double worst_residual = 0.0;
      for (const auto& l : tr.conservation) worst_residual = std::max(worst_residual, l.relative_residual());
      per_trial.push_back({{"seed", result.seeds[i]},
                           {"file", trial_files[i]},
                           {"admissibility_checks", tr.admissibility_checks},
                           {"worst_availability_violation", tr.worst_availability},
                           {"worst_capacity_violation", tr.worst_capacity},
                           {"conservation_residual", worst_residual},
                           {"lp_iterations", tr.lp_iterations}});
    }
    manifest["per_trial"] = per_trial;
  }
  manifest["ensemble"] = "ensemble.csv";
  manifest["ensemble_stride"] = stride;
  manifest["window"] = window;
  write_text(out / "manifest.json", manifest.dump(2) + "\n");

  if (traces.empty() || traces.front()->slots == 0) return;
  write_stream(out / "ensemble.csv",
               [&](std::ostream& os) { write_ensemble_csv(os, ensemble_table(traces, window, stride)); });

  const auto prefixes = prefixes_of(traces);
  const std::size_t C = traces.front()->commodities;
  const double gamma = cfg.commodities.empty() ? 0.9 : cfg.commodities.front().gamma_long;
  const std::string tag = " (" + variant_label(cfg.policy.variant) + ")";
  write_plot(out / "plots" / "reliability_cumulative.svg",
             {"Long-term reliability level" + tag, "slot", "cumulative reliability level", gamma, {}, {}},
             band_series(prefixes, C, SeriesKind::CumulativeLevel, window, stride));
  write_plot(out / "plots" / "reliability_short_term.svg",
             {"Short-term reliability level" + tag, "slot", "reliability level over T_win", gamma, {}, {}},
             band_series(prefixes, C, SeriesKind::ShortTermLevel, window, stride));
  write_plot(out / "plots" / "throughput_cumulative.svg",
             {"Timely throughput" + tag, "slot", "packets per slot", {}, {}, {}},
             band_series(prefixes, C, SeriesKind::CumulativeThroughput, window, stride));
  write_plot(out / "plots" / "cost_cumulative.svg", {"Long-term cost" + tag, "slot", "cost per slot", {}, {}, {}},
             band_series(prefixes, C, SeriesKind::CumulativeCost, window, stride));
  write_capacities(out, result.trials.front().trace);

  if (result.overlay && !result.overlay->labels.empty()) {
    const auto& ov = result.overlay.value();
    std::vector<PlotSeries> series;
    write_stream(out / "flow_matching.csv", [&](std::ostream& os) {
      os << "t";
      for (const auto& l : ov.labels) os << ",nu[" << l << "],x[" << l << "]";
      os << '\n';
      for (std::size_t s = 0; s < ov.t.size(); ++s) {
        os << ov.t[s];
        for (std::size_t k = 0; k < ov.labels.size(); ++k) {
          os << ',' << format_double(ov.nu[k][s]) << ',' << format_double(ov.x[k][s]);
        }
        os << '\n';
      }
    });
    const auto t = as_double(ov.t);
    for (std::size_t k = 0; k < ov.labels.size() && k < 4; ++k) {
      series.push_back({"nu " + ov.labels[k], t, ov.nu[k], {}, false});
      series.push_back({"x " + ov.labels[k], t, ov.x[k], {}, false});
    }
    write_plot(out / "plots" / "flow_matching.svg",
               {"Cumulative virtual vs actual flow (trial 0)", "slot", "packets", {}, {}, {}}, series);
  }
}

void parse_sweep(const std::string& text, RegionAxes& axes) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("sweep '" + text + "': expected name=v1,v2,...");
  const std::string name = text.substr(0, eq);
  std::vector<double> values;
  std::stringstream ss(text.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("sweep '" + text + "': bad value '" + item + "'");
    }
  }
  if (values.empty()) throw ConfigError("sweep '" + text + "': no values");
  if (name == "lambda_o") {
    axes.lambda_o = values;
  } else if (name == "gamma_long") {
    axes.gamma_long = values;
  } else if (name == "gamma_short") {
    axes.gamma_short = values;
  } else if (name == "p_resil") {
    axes.p_resil = values;
  } else if (name == "t_recover") {
    axes.recover.clear();
    for (double v : values) axes.recover.push_back(static_cast<std::int64_t>(std::llround(v)));
  } else {
    throw ConfigError("sweep: unknown axis '" + name + "'");
  }
}

std::vector<RegionRow> evaluate_region(const TraceSet& traces, double lambda_o, const RegionAxes& axes,
                                       const ExperimentConfig& defaults, double default_gamma_long) {
  auto or_default = [](const std::vector<double>& v, double d) { return v.empty() ? std::vector<double>{d} : v; };
  const auto gl = or_default(axes.gamma_long, default_gamma_long);
  const auto gs = or_default(axes.gamma_short, defaults.gamma_short);
  const auto pr = or_default(axes.p_resil, defaults.p_resil);
  const auto rc = axes.recover.empty() ? std::vector<std::int64_t>{defaults.recover} : axes.recover;
  const std::size_t C = traces.front()->commodities;
  std::vector<RegionRow> rows;
  for (double g_long : gl) {
    for (double g_short : gs) {
      for (std::int64_t rec : rc) {
        for (double p : pr) {
          const auto spec = ReliabilitySpec::uniform(C, g_long, g_short, defaults.window, rec, p);
          RegionRow row;
          row.lambda_o = lambda_o;
          row.gamma_long = g_long;
          row.gamma_short = g_short;
          row.recover = rec;
          row.p_resil = p;
          const auto pre = reliability_membership(traces, spec, Phase::PreOutage);
          const auto post = reliability_membership(traces, spec, Phase::PostOutage);
          const auto res = resilience_membership(traces, spec);
          row.pre_member = pre.member;
          row.post_member = post.member;
          row.resilience_member = res.member;
          row.pre_level = pre.level;
          row.post_level = post.level;
          row.p_at_recover = res.p_at_recover;
          row.worst_p = res.worst_after;
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

std::vector<RegionRow> run_region(const ScenarioConfig& config, const RegionAxes& axes,
                                  const ExperimentOptions& options) {
  if (config.outage.time < 0) throw ConfigError("region: the scenario needs an outage");
  std::vector<RegionRow> rows;
  for (double scale : axes.lambda_o) {
    ScenarioConfig cfg = config;
    cfg.outage.arrival_scale = scale;
    log_line(options, "region: lambda_o = " + format_double(scale));
    const auto result = run_experiment(cfg, options);
    const double g_long = cfg.commodities.empty() ? 0.9 : cfg.commodities.front().gamma_long;
    auto part = evaluate_region(result.traces(), scale, axes, cfg.experiment, g_long);
    rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return rows;
}

void write_region_csv(std::ostream& os, const std::vector<RegionRow>& rows) {
  const std::size_t C = rows.empty() ? 0 : rows.front().pre_level.size();
  os << "lambda_o,gamma_long,gamma_short,t_recover,p_resil,pre_member,post_member,resilience_member";
  for (const char* name : {"pre_level", "post_level", "p_at_recover", "worst_p"}) {
    for (std::size_t c = 1; c <= C; ++c) os << ',' << name << "_c" << c;
  }
  os << '\n';
  for (const auto& r : rows) {
    os << format_double(r.lambda_o) << ',' << format_double(r.gamma_long) << ',' << format_double(r.gamma_short)
       << ',' << r.recover << ',' << format_double(r.p_resil) << ',' << r.pre_member << ',' << r.post_member << ','
       << r.resilience_member;
    for (const auto* v : {&r.pre_level, &r.post_level, &r.p_at_recover, &r.worst_p}) {
      for (double x : *v) os << ',' << format_double(x);
    }
    os << '\n';
  }
}

void run_compare(const ScenarioConfig& config, const std::vector<PolicyVariant>& variants, const fs::path& out,
                 const ExperimentOptions& options) {
  if (variants.empty()) throw ConfigError("compare: no variants given");
  ensure_dir(out / "plots");
  std::vector<ExperimentResult> results;
  for (PolicyVariant v : variants) {
    ScenarioConfig cfg = config;
    cfg.policy.variant = v;
    log_line(options, std::string("compare: running ") + variant_name(v));
    results.push_back(run_experiment(cfg, options));
    write_experiment(results.back(), out / variant_name(v), options);
  }
  if (config.experiment.horizon == 0) return;
  const std::int64_t stride = options.stride > 0 ? options.stride : default_stride(config.experiment.horizon);
  const std::int64_t window = config.experiment.window;
  std::vector<std::vector<TracePrefix>> prefixes;
  for (const auto& r : results) prefixes.push_back(prefixes_of(r.traces()));
  const std::size_t C = results.front().trials.empty() ? 0 : results.front().trials.front().trace.commodities;

  write_stream(out / "compare.csv", [&](std::ostream& os) {
    std::vector<std::vector<double>> cols;
    std::vector<std::int64_t> t;
    os << "t";
    for (std::size_t k = 0; k < results.size(); ++k) {
      for (std::size_t c = 0; c < C; ++c) {
        for (SeriesKind kind : {SeriesKind::CumulativeLevel, SeriesKind::ShortTermLevel, SeriesKind::CumulativeCost}) {
          const Band b = ensemble_band(prefixes[k], c, kind, window, stride);
          if (t.empty()) t = b.t;
          const std::string base =
              std::string(variant_name(variants[k])) + "_" + series_name(kind) + "_c" + std::to_string(c + 1);
          os << ',' << base << "_mean," << base << "_sigma";
          cols.push_back(b.mean);
          cols.push_back(b.sigma);
        }
      }
    }
    os << '\n';
    for (std::size_t r = 0; r < t.size(); ++r) {
      os << t[r];
      for (const auto& col : cols) os << ',' << format_double(col[r]);
      os << '\n';
    }
  });

  const double gamma = config.commodities.empty() ? 0.9 : config.commodities.front().gamma_long;
  for (std::size_t c = 0; c < C; ++c) {
    std::vector<PlotSeries> series;
    for (std::size_t k = 0; k < results.size(); ++k) {
      const Band b = ensemble_band(prefixes[k], c, SeriesKind::CumulativeLevel, window, stride);
      series.push_back({variant_label(variants[k]), as_double(b.t), b.mean, b.sigma, false});
    }
    write_plot(out / "plots" / ("compare_reliability_c" + std::to_string(c + 1) + ".svg"),
               {"Long-term reliability, commodity " + std::to_string(c + 1), "slot", "cumulative reliability level",
                gamma, {}, {}},
               series);
  }
}

}  // namespace cnc
