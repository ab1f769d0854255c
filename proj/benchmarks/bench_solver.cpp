// Microbenchmarks for the completion solver: factor updates on a synthetic
// low-rank matrix and an end-to-end fit at a couple of ranks.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "fita/data_org.hpp"
#include "fita/rng.hpp"
#include "fita/srmf.hpp"

namespace {

struct SyntheticProblem {
  fita::SafetyMatrix training;
  fita::SamplingMask mask;
};

SyntheticProblem make_problem(int rows, int steps, int scenarios,
                              double observed_fraction) {
  SyntheticProblem problem;
  problem.training.dims.value_count = rows;
  problem.training.dims.step_count = steps;
  problem.training.dims.scenario_count = scenarios;
  const int columns = steps * scenarios;

  fita::Rng rng(7);
  Eigen::MatrixXd left(5, rows);
  Eigen::MatrixXd right(5, columns);
  for (int r = 0; r < left.rows(); ++r) {
    for (int c = 0; c < left.cols(); ++c) left(r, c) = rng.normal();
    for (int c = 0; c < right.cols(); ++c) right(r, c) = rng.normal();
  }
  problem.training.values = left.transpose() * right;

  problem.mask.dims = problem.training.dims;
  problem.mask.scenario_tested.assign(static_cast<std::size_t>(scenarios), 1);
  problem.mask.scenario_fraction.assign(static_cast<std::size_t>(scenarios),
                                        observed_fraction);
  const int total = rows * columns;
  const int keep = static_cast<int>(observed_fraction * total);
  const std::vector<std::int64_t> chosen = rng.sample_without_replacement(total, keep);
  problem.mask.observed.reserve(chosen.size());
  for (std::int64_t flat : chosen) {
    problem.mask.observed.emplace_back(static_cast<int>(flat / columns),
                                       static_cast<int>(flat % columns));
  }
  return problem;
}

void bench_fit(benchmark::State& state) {
  const SyntheticProblem problem = make_problem(50, 19, 50, 0.3);
  fita::SrmfOptions options;
  options.rank = static_cast<int>(state.range(0));
  options.max_iters = 20;
  options.seed = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fita::fit_srmf(problem.training, problem.mask, options));
  }
}

void bench_single_sweep_updates(benchmark::State& state) {
  const SyntheticProblem problem = make_problem(50, 19, 50, 0.3);
  fita::SrmfOptions options;
  options.rank = 10;
  options.seed = 3;
  const fita::ObservedIndex index = fita::build_observed_index(problem.mask);
  fita::SrmfState base = fita::initialize_state(problem.training.dims, options);
  for (auto _ : state) {
    fita::SrmfState working = base;
    fita::update_h(problem.training.values, index, working, options,
                   problem.training.dims);
    fita::update_w(problem.training.values, index, working, options);
    fita::update_t(working, options);
    benchmark::DoNotOptimize(working);
  }
}

void bench_predict(benchmark::State& state) {
  const SyntheticProblem problem = make_problem(50, 19, 50, 0.3);
  fita::SrmfOptions options;
  options.rank = 10;
  options.max_iters = 10;
  options.seed = 3;
  const fita::SrmfModel model =
      fita::fit_srmf(problem.training, problem.mask, options);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fita::predict_completion(model));
  }
}

}  // namespace

BENCHMARK(bench_fit)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_single_sweep_updates)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_predict)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
