#include <doctest.h>

#include <filesystem>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <cmath>

#include "cnc/experiment.hpp"
#include "cnc/svg_plot.hpp"
#include "cnc/trace_io.hpp"
#include "fixtures.hpp"

using namespace cnc;
namespace fs = std::filesystem;

namespace {

ScenarioConfig tiny(int trials) {
  auto c = cnc::testing::small_abilene(160, 80, trials);
  c.policy.frame_length = 40;
  c.experiment.window = 20;
  c.experiment.recover = 40;
  return c;
}

fs::path fresh_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("cnc_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("double formatting round-trips") {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 22960.0, 6.82488e-05, 1e300}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("trace CSV round trip is exact") {
  const auto config = tiny(1);
  const auto result = run_trial(build_scenario(config), config.policy, 9);
  std::stringstream ss;
  write_trace_csv(ss, result.trace, 9);
  const auto back = read_trace_csv(ss);
  CHECK(back.slots == result.trace.slots);
  CHECK(back.commodities == result.trace.commodities);
  CHECK(back.outage_time == 80);
  CHECK(back.final_scaling == result.trace.final_scaling);
  CHECK(back.arrivals == result.trace.arrivals);
  CHECK(back.deliveries == result.trace.deliveries);
  CHECK(back.cost == result.trace.cost);
  CHECK(back.backlog == result.trace.backlog);
  std::stringstream again;
  write_trace_csv(again, back, 9);
  std::stringstream first;
  write_trace_csv(first, result.trace, 9);
  CHECK(again.str() == first.str());
}

TEST_CASE("malformed trace CSV is an I/O error") {
  std::stringstream ss("# trace v1\nnot,a,header\n");
  CHECK_THROWS_AS(read_trace_csv(ss), IoError);
  CHECK_THROWS_AS(load_trace_csv("/nonexistent/trace.csv"), IoError);
}

TEST_CASE("trial seeds are distinct and reproducible") {
  const auto a = trial_seeds(7, 8);
  CHECK(a == trial_seeds(7, 8));
  CHECK(std::set<std::uint64_t>(a.begin(), a.end()).size() == 8);
  CHECK(trial_seeds(7, 3) == std::vector<std::uint64_t>(a.begin(), a.begin() + 3));
}

TEST_CASE("eight seeds give distinct traces under one config hash") {
  auto config = tiny(8);
  config.experiment.horizon = 40;
  config.policy.horizon = 40;
  ExperimentOptions opts;
  opts.jobs = 2;
  const auto result = run_experiment(config, opts);
  REQUIRE(result.trials.size() == 8);
  CHECK(result.config_hash == config_hash(config));
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(result.trials[i].seed == result.seeds[i]);
    for (std::size_t j = i + 1; j < 8; ++j) CHECK(result.trials[i].trace.arrivals != result.trials[j].trace.arrivals);
  }
  // Worker count does not change results.
  opts.jobs = 1;
  const auto serial = run_experiment(config, opts);
  for (std::size_t i = 0; i < 8; ++i) CHECK(serial.trials[i].trace.deliveries == result.trials[i].trace.deliveries);
}

TEST_CASE("written bundle reproduces the in-memory ensemble") {
  const auto config = tiny(3);
  ExperimentOptions opts;
  opts.verbose = true;
  opts.stride = 7;
  const auto result = run_experiment(config, opts);
  const auto out = fresh_dir("bundle");
  write_experiment(result, out, opts);
  for (const char* f : {"manifest.json", "config.json", "ensemble.csv", "capacities.csv", "flow_matching.csv",
                        "trials/trial_000.csv", "trials/trial_002.csv", "plots/reliability_cumulative.svg",
                        "plots/reliability_short_term.svg", "plots/cost_cumulative.svg", "plots/flow_matching.svg"}) {
    CHECK_MESSAGE(fs::exists(out / f), f);
  }
  CHECK(load_config(out / "config.json").name == config.name);

  std::vector<TrialTrace> loaded;
  for (int i = 0; i < 3; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "trial_%03d.csv", i);
    loaded.push_back(load_trace_csv(out / "trials" / name));
  }
  TraceSet from_disk;
  for (const auto& t : loaded) from_disk.push_back(&t);
  const auto disk = ensemble_table(from_disk, config.experiment.window, 7);
  const auto mem = ensemble_table(result.traces(), config.experiment.window, 7);
  REQUIRE(disk.columns == mem.columns);
  REQUIRE(disk.t == mem.t);
  double worst = 0.0;
  for (std::size_t c = 0; c < mem.values.size(); ++c) {
    for (std::size_t r = 0; r < mem.values[c].size(); ++r) {
      const double a = mem.values[c][r], b = disk.values[c][r];
      if (std::isnan(a) || std::isnan(b)) {
        CHECK(std::isnan(a) == std::isnan(b));
        continue;
      }
      worst = std::max(worst, std::abs(a - b));
    }
  }
  CHECK(worst <= 1e-12);

  std::stringstream csv;
  write_ensemble_csv(csv, mem);
  CHECK(slurp(out / "ensemble.csv") == csv.str());
  fs::remove_all(out);
}

TEST_CASE("region evaluation on shared traces") {
  const auto config = tiny(2);
  const auto result = run_experiment(config);
  RegionAxes axes;
  parse_sweep("gamma_long=0.0,1.0", axes);
  parse_sweep("p_resil=0.0", axes);
  const auto rows = evaluate_region(result.traces(), 0.75, axes, config.experiment, 0.9);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].pre_member);
  CHECK(rows[0].post_member);
  CHECK(rows[0].resilience_member);
  CHECK_FALSE(rows[1].pre_member);
  CHECK(rows[0].pre_level == rows[1].pre_level);
  std::stringstream ss;
  write_region_csv(ss, rows);
  CHECK(ss.str().rfind("lambda_o,gamma_long,gamma_short,t_recover,p_resil", 0) == 0);
  CHECK_THROWS_AS(parse_sweep("bogus=1", axes), ConfigError);
  CHECK_THROWS_AS(parse_sweep("gamma_long", axes), ConfigError);
}

TEST_CASE("region sweep requires an outage") {
  auto config = tiny(1);
  config.outage.time = -1;
  CHECK_THROWS_AS(run_region(config, RegionAxes{}), ConfigError);
}

TEST_CASE("SVG output is deterministic and draws the reference line") {
  PlotSpec spec;
  spec.title = "level";
  spec.reference = 0.9;
  PlotSeries s{"c1", {0, 1, 2, 3}, {0.5, 0.85, 0.95, 0.92}, {0.01, 0.02, 0.02, 0.01}, false};
  const auto a = render_svg(spec, {s});
  CHECK(a == render_svg(spec, {s}));
  CHECK(a.find("class=\"reference\"") != std::string::npos);
  CHECK(a.find("<polygon") != std::string::npos);
  CHECK(a.rfind("<svg", 0) == 0);

  PlotSpec plain;
  PlotSeries flat{"flat", {0, 1, 2}, {1, 1, 1}, {}, false};
  const auto b = render_svg(plain, {flat});
  CHECK(b.find("class=\"reference\"") == std::string::npos);
  CHECK(b.find("<polygon") == std::string::npos);

  PlotSeries empty{"none", {}, {}, {}, false};
  CHECK_THROWS_AS(render_svg(plain, {empty}), std::invalid_argument);
}

TEST_CASE("compare writes one bundle per variant") {
  const auto config = tiny(1);
  const auto out = fresh_dir("compare");
  run_compare(config, {PolicyVariant::ResRCNC, PolicyVariant::RCNCBaseline}, out);
  CHECK(fs::exists(out / "resrcnc" / "manifest.json"));
  CHECK(fs::exists(out / "rcnc" / "manifest.json"));
  CHECK(fs::exists(out / "compare.csv"));
  CHECK(fs::exists(out / "plots" / "compare_reliability_c1.svg"));
  // Same seeds for both variants.
  const auto a = load_trace_csv(out / "resrcnc" / "trials" / "trial_000.csv");
  const auto b = load_trace_csv(out / "rcnc" / "trials" / "trial_000.csv");
  CHECK(a.arrivals == b.arrivals);
  fs::remove_all(out);
}
