// Microbenchmarks for the ground-truth simulator: single episodes at a few
// interesting operating points, plus a full-space sweep over a reduced grid.

#include <benchmark/benchmark.h>

#include "fita/config.hpp"
#include "fita/simulator.hpp"

namespace {

fita::ExperimentConfig small_config() {
  fita::ExperimentConfig config = fita::default_config();
  config.space.fault_grid.value_count = 10;
  config.space.fault_grid.time_step_count = 10;
  return config;
}

void bench_episode_car_following(benchmark::State& state) {
  const fita::ExperimentConfig config = fita::default_config();
  fita::ConcreteScenario scenario;
  scenario.global_index = 9;
  scenario.functional_id = 1;
  scenario.kind = fita::ScenarioKind::kCarFollowing;
  scenario.parameter_value = 16.0;
  const fita::FaultSpec fault{static_cast<double>(state.range(0)) / 10.0, 0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fita::run_episode(scenario, fault, config.simulation, config.idm));
  }
}

void bench_episode_cut_in(benchmark::State& state) {
  const fita::ExperimentConfig config = fita::default_config();
  fita::ConcreteScenario scenario;
  scenario.global_index = 0;
  scenario.functional_id = 0;
  scenario.kind = fita::ScenarioKind::kCutIn;
  scenario.parameter_value = 5.0;
  const fita::FaultSpec fault{static_cast<double>(state.range(0)) / 10.0, 0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fita::run_episode(scenario, fault, config.simulation, config.idm));
  }
}

void bench_full_space_small(benchmark::State& state) {
  const fita::ExperimentConfig config = small_config();
  const fita::TestSpace space = fita::build_test_space(config.space);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fita::simulate_full_space(space, config.simulation, config.idm));
  }
}

}  // namespace

BENCHMARK(bench_episode_car_following)->Arg(0)->Arg(20)->Arg(49);
BENCHMARK(bench_episode_cut_in)->Arg(0)->Arg(20)->Arg(49);
BENCHMARK(bench_full_space_small)->Unit(benchmark::kMillisecond);
