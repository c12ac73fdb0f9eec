// Command-line front end: run, region, compare, dump-lp, validate.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cnc/config.hpp"
#include "cnc/experiment.hpp"
#include "cnc/trace_io.hpp"

namespace fs = std::filesystem;
using namespace cnc;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kSimulation = 3, kIo = 4 };

struct Common {
  std::string scenario = "abilene";
  std::optional<int> trials;
  std::optional<std::int64_t> horizon;
  std::optional<std::int64_t> outage_at;
  std::optional<double> lambda_scale;
  std::optional<std::string> variant;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  int jobs = 1;
  std::int64_t stride = 0;
  bool verbose = false;
};

void add_common(CLI::App* cmd, Common& c, bool outputs = true) {
  cmd->add_option("--scenario", c.scenario, "built-in name (abilene) or path to a config file")
      ->capture_default_str();
  cmd->add_option("--trials", c.trials, "number of Monte Carlo trials")->check(CLI::PositiveNumber);
  cmd->add_option("--horizon", c.horizon, "slots per trial")->check(CLI::NonNegativeNumber);
  cmd->add_option("--outage-at", c.outage_at, "outage slot (negative disables)");
  cmd->add_option("--lambda-scale", c.lambda_scale, "post-outage arrival scale")->check(CLI::NonNegativeNumber);
  cmd->add_option("--variant", c.variant, "resrcnc or rcnc");
  cmd->add_option("--seed", c.seed, "master seed");
  if (outputs) {
    cmd->add_option("--out", c.out, "output directory")->capture_default_str();
    cmd->add_option("--jobs", c.jobs, "parallel trials")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--stride", c.stride, "ensemble sampling step in slots (0: auto)");
  }
  cmd->add_flag("--verbose", c.verbose, "progress on stderr; flow-matching overlays");
}

ScenarioConfig resolve(const Common& c) {
  ScenarioConfig cfg;
  if (c.scenario == "abilene") {
    cfg = builtin_abilene();
  } else {
    fs::path p = c.scenario;
    if (!fs::exists(p) && fs::exists(fs::path("scenarios") / (c.scenario + ".cfg"))) {
      p = fs::path("scenarios") / (c.scenario + ".cfg");
    }
    cfg = load_config(p);
  }
  Overrides o;
  o.trials = c.trials;
  o.horizon = c.horizon;
  o.outage_at = c.outage_at;
  o.lambda_scale = c.lambda_scale;
  o.seed = c.seed;
  if (c.variant) o.variant = parse_variant(*c.variant);
  return apply_overrides(cfg, o);
}

ExperimentOptions options_of(const Common& c) {
  ExperimentOptions opt;
  opt.jobs = c.jobs;
  opt.stride = c.stride;
  opt.verbose = c.verbose;
  if (c.verbose) opt.log = [](const std::string& m) { std::cerr << m << '\n'; };
  return opt;
}

void print_summary(const ExperimentResult& r) {
  const auto traces = r.traces();
  if (traces.empty() || traces.front()->slots == 0) return;
  const auto& cfg = r.config;
  const std::size_t C = traces.front()->commodities;
  const auto spec = ReliabilitySpec::uniform(C, 0.0, cfg.experiment.gamma_short, cfg.experiment.window,
                                             cfg.experiment.recover, cfg.experiment.p_resil);
  const bool outage = cfg.outage.time > 0 && cfg.outage.time < cfg.experiment.horizon;
  const auto pre = reliability_membership(traces, spec, Phase::PreOutage);
  std::cout << "commodity  pre-outage level";
  std::optional<ReliabilityResult> post;
  if (outage) {
    post = reliability_membership(traces, spec, Phase::PostOutage);
    std::cout << "  post-outage level";
  }
  std::cout << '\n';
  for (std::size_t c = 0; c < C; ++c) {
    std::cout << "  " << c + 1 << "        " << format_double(pre.level[c]);
    if (post) std::cout << "  " << format_double(post->level[c]);
    std::cout << '\n';
  }
}

int run_cmd(const Common& c) {
  const auto cfg = resolve(c);
  const auto opt = options_of(c);
  const auto result = run_experiment(cfg, opt);
  write_experiment(result, c.out, opt);
  std::cout << "wrote " << result.trials.size() << " trials to " << c.out << " in " << result.wall_seconds
            << " s (config " << result.config_hash << ")\n";
  print_summary(result);
  return kOk;
}

int region_cmd(const Common& c, const std::vector<std::string>& sweeps) {
  const auto cfg = resolve(c);
  RegionAxes axes;
  axes.lambda_o = {cfg.outage.arrival_scale};
  for (const auto& s : sweeps) parse_sweep(s, axes);
  const auto rows = run_region(cfg, axes, options_of(c));
  fs::create_directories(c.out);
  const auto path = fs::path(c.out) / "region.csv";
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string());
  write_region_csv(os, rows);
  write_region_csv(std::cout, rows);
  return kOk;
}

int compare_cmd(const Common& c, const std::string& variants) {
  const auto cfg = resolve(c);
  std::vector<PolicyVariant> vs;
  std::stringstream ss(variants);
  std::string item;
  while (std::getline(ss, item, ',')) vs.push_back(parse_variant(item));
  run_compare(cfg, vs, c.out, options_of(c));
  std::cout << "wrote comparison to " << c.out << '\n';
  return kOk;
}

int dump_lp_cmd(const Common& c, std::int64_t slot, const std::string& file) {
  auto cfg = resolve(c);
  const auto scenario = build_scenario(cfg);
  const auto seed = trial_seeds(cfg.experiment.master_seed, 1).front();
  Engine engine(scenario, cfg.policy, seed);
  for (std::int64_t t = 0; t < slot; ++t) engine.step();
  const auto problem = engine.current_lp(true);
  const auto solution = make_default_solver()->solve(problem.lp);
  const auto names = variable_labels(engine.view(), problem);
  auto emit = [&](std::ostream& os) {
    os << "# flow-matching LP at slot " << slot << ", seed " << seed << '\n';
    write_lp_text(os, problem.lp, names, problem.row_labels, &solution);
  };
  if (file.empty() || file == "-") {
    emit(std::cout);
  } else {
    std::ofstream os(file);
    if (!os) throw IoError("cannot open " + file);
    emit(os);
  }
  return kOk;
}

int validate_cmd(const Common& c) {
  const auto cfg = resolve(c);
  const auto scenario = build_scenario(cfg);
  Engine engine(scenario, cfg.policy, 0);
  std::cout << "scenario " << cfg.name << ": " << scenario.network.num_nodes() << " nodes, "
            << scenario.network.num_links() << " directed links, " << scenario.commodities.size()
            << " commodities\n";
  for (std::size_t s = 0; s < scenario.services.size(); ++s) {
    const LayeredGraph g(scenario.network, scenario.services[s]);
    std::cout << "service " << scenario.services[s].id << ": layered graph " << g.num_nodes() << " nodes, "
              << g.num_edges() << " edges\n";
  }
  const auto& p = engine.penalty();
  std::cout << "V = " << p.v << " (V' = " << p.v_raw << ", C_avg = " << p.c_avg << ", e_avg = " << p.e_avg << ")\n";
  std::cout << "config hash " << config_hash(cfg) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resilient reliable cloud-network control simulator"};
  app.require_subcommand(1);
  Common common;

  auto* run = app.add_subcommand("run", "Monte Carlo trials with CSV, manifest and SVG output");
  add_common(run, common);
  auto* region = app.add_subcommand("region", "reliability and resilience membership grid");
  add_common(region, common);
  std::vector<std::string> sweeps;
  region->add_option("--sweep", sweeps, "axis=v1,v2,... (lambda_o, gamma_long, gamma_short, t_recover, p_resil)");
  auto* compare = app.add_subcommand("compare", "paired runs of several policy variants");
  add_common(compare, common);
  std::string variants = "resrcnc,rcnc";
  compare->add_option("--variants", variants, "comma-separated variants")->capture_default_str();
  auto* dump = app.add_subcommand("dump-lp", "write the flow-matching LP of one slot as text");
  add_common(dump, common, false);
  std::int64_t slot = 0;
  std::string lp_file = "-";
  dump->add_option("--slot", slot, "slot whose LP is dumped")->check(CLI::NonNegativeNumber);
  dump->add_option("--file", lp_file, "output file ('-' for stdout)");
  auto* validate = app.add_subcommand("validate", "load a scenario and print a summary");
  add_common(validate, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return run_cmd(common);
    if (*region) return region_cmd(common, sweeps);
    if (*compare) return compare_cmd(common, variants);
    if (*dump) return dump_lp_cmd(common, slot, lp_file);
    if (*validate) return validate_cmd(common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << '\n';
    return kSimulation;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}
