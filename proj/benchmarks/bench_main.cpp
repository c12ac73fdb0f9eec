#include <benchmark/benchmark.h>

#include <random>

#include "cnc/config.hpp"
#include "cnc/engine.hpp"

using namespace cnc;

namespace {

ScenarioConfig bench_config() {
  Overrides o;
  o.horizon = 1000000;
  o.outage_at = -1;
  return apply_overrides(builtin_abilene(), o);
}

// Engine warmed up past the initial transient so the LP has realistic size.
struct Warm {
  ScenarioConfig config = bench_config();
  Scenario scenario = build_scenario(config);
  Engine engine{scenario, config.policy, 1};
  explicit Warm(int slots) {
    for (int t = 0; t < slots; ++t) engine.step();
  }
};

void BM_EngineStep(benchmark::State& state) {
  Warm w(static_cast<int>(state.range(0)));
  for (auto _ : state) w.engine.step();
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EngineStep)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_FlowMatchingSolve(benchmark::State& state) {
  Warm w(200);
  const auto problem = w.engine.current_lp(false);
  RevisedSimplex solver;
  for (auto _ : state) {
    auto sol = solver.solve(problem.lp);
    benchmark::DoNotOptimize(sol.objective);
  }
  state.counters["variables"] = static_cast<double>(problem.lp.num_variables());
  state.counters["rows"] = static_cast<double>(problem.lp.num_rows());
}
BENCHMARK(BM_FlowMatchingSolve)->Unit(benchmark::kMicrosecond);

void BM_FlowMatchingBuild(benchmark::State& state) {
  Warm w(200);
  for (auto _ : state) {
    auto problem = w.engine.current_lp(false);
    benchmark::DoNotOptimize(problem.variables.data());
  }
}
BENCHMARK(BM_FlowMatchingBuild)->Unit(benchmark::kMicrosecond);

void BM_MaxWeight(benchmark::State& state) {
  Warm w(200);
  const auto& view = w.engine.view();
  const auto weights = compute_weights(view, w.engine.virtual_queues(), w.engine.penalty().v);
  for (auto _ : state) {
    auto nu = max_weight_assign(view, weights, w.engine.virtual_capacities());
    benchmark::DoNotOptimize(nu.data());
  }
}
BENCHMARK(BM_MaxWeight)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
