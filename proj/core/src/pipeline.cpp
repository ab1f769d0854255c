#include "fita/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fita/baselines.hpp"
#include "fita/data_org.hpp"

namespace fita {
namespace {

template <typename Fn>
auto guarded(const std::string& stage, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;  // already tagged
  } catch (const std::exception& error) {
    throw StageError(stage, error.what());
  }
}

std::vector<int> scenario_groups_of(const TestSpace& space) {
  std::vector<int> groups;
  groups.reserve(space.scenarios.size());
  for (const ConcreteScenario& scenario : space.scenarios) {
    groups.push_back(scenario.functional_id);
  }
  return groups;
}

std::vector<std::string> heatmap_names(const TestSpace& space) {
  std::vector<std::string> names;
  for (int s = 0; s < space.scenario_count(); ++s) {
    names.push_back("scenario_" + std::to_string(s) + "_pred.csv");
    names.push_back("scenario_" + std::to_string(s) + "_truth.csv");
  }
  return names;
}

}  // namespace

SimulateResult simulate_in_memory(const ExperimentConfig& config) {
  return guarded("simulate", [&] {
    SimulateResult result;
    result.space = build_test_space(config.space);
    GroundTruth truth = simulate_full_space(result.space, config.simulation, config.idm);
    result.truth = std::move(truth.matrix);
    result.wall_seconds = truth.wall_seconds;
    return result;
  });
}

CompleteResult complete_in_memory(const ExperimentConfig& config, const TestSpace& space,
                                  const SafetyMatrix& truth) {
  return guarded("complete", [&] {
    CompleteResult result;
    result.mask = build_sampling_mask(space, config.sampling);
    const SafetyMatrix sampled = apply_sampling(truth, result.mask);
    const double shift = config.simulation.ttc_cap + 1.0;
    const SafetyMatrix shifted = shift_to_positive(sampled, result.mask, shift);
    SrmfOptions options = config.solver;
    if (options.mask_cross_block_smoothness) {
      options.scenario_groups = scenario_groups_of(space);
    }
    result.model = fit_srmf(shifted, result.mask, options, &result.fit_seconds);
    result.prediction = predict_completion(result.model, &result.predict_seconds);
    return result;
  });
}

EvaluationReport evaluate_in_memory(const ExperimentConfig& config, const TestSpace& space,
                                    const SafetyMatrix& truth, const SamplingMask& mask,
                                    const SafetyMatrix& prediction, const TimingReport& timing) {
  return guarded("evaluate", [&] {
    if (truth.dims != mask.dims || prediction.dims != mask.dims) {
      throw std::invalid_argument("evaluate: artifact dims disagree");
    }
    const EvalCellSet cells = evaluation_cell_set(mask, config.evaluation.mode);
    if (cells.empty()) {
      throw std::invalid_argument(
          "empty evaluation set (every cell is observed; nothing to predict)");
    }

    EvaluationReport report;
    report.mode = config.evaluation.mode;
    report.rare_threshold = config.evaluation.rare_threshold;
    report.total_cells = static_cast<long>(mask.dims.rows()) * mask.dims.columns();
    report.observed_cells = static_cast<long>(mask.observed_count());
    report.evaluated_cells = static_cast<long>(cells.size());

    report.methods.push_back(scenario_breakdown("srmf", prediction.values, truth.values, space,
                                                mask, cells, config.evaluation.rare_threshold));
    for (const std::string& name : config.baselines) {
      Eigen::MatrixXd baseline = name == "knn" ? knn_complete(space, truth, mask, config.knn_k)
                                               : mean_complete(space, truth, mask);
      report.methods.push_back(scenario_breakdown(name, baseline, truth.values, space, mask,
                                                  cells, config.evaluation.rare_threshold));
    }

    report.timing = timing;
    report.timing.simulation_seconds_eval_cells =
        report.total_cells > 0 ? timing.simulation_seconds * report.evaluated_cells /
                                     static_cast<double>(report.total_cells)
                               : 0.0;
    report.timing.acceleration_rate =
        timing.predict_seconds > 0.0
            ? acceleration_rate(report.timing.simulation_seconds_eval_cells,
                                timing.predict_seconds)
            : 0.0;
    return report;
  });
}

SimulateResult run_simulate_stage(const ExperimentConfig& config, const std::string& out_dir) {
  SimulateResult result = simulate_in_memory(config);
  guarded("simulate", [&] {
    ensure_directory(out_dir);
    write_cells_csv(out_dir + "/ground_truth.csv", result.truth);
    write_ground_truth_meta(out_dir + "/ground_truth_meta.json", result.space, config.simulation,
                            config.idm, result.wall_seconds);
    TimingReport timing = read_timing_json(out_dir + "/timing.json");
    timing.simulation_seconds = result.wall_seconds;
    write_timing_json(out_dir + "/timing.json", timing);
    write_manifest(out_dir, "simulate",
                   {"ground_truth.csv", "ground_truth_meta.json", "timing.json"});
    return 0;
  });
  return result;
}

CompleteResult run_complete_stage(const ExperimentConfig& config, const std::string& out_dir) {
  TestSpace space;
  SafetyMatrix truth;
  guarded("complete", [&] {
    space = build_test_space(config.space);
    const GroundTruthMeta meta = read_ground_truth_meta(out_dir + "/ground_truth_meta.json");
    const MatrixDims expected{space.fault_grid.value_count, space.fault_grid.time_step_count,
                              space.scenario_count()};
    if (meta.dims != expected) {
      throw std::invalid_argument(
          "ground truth dims " + std::to_string(meta.dims.value_count) + "x" +
          std::to_string(meta.dims.step_count) + "x" + std::to_string(meta.dims.scenario_count) +
          " do not match the configured space " + std::to_string(expected.value_count) + "x" +
          std::to_string(expected.step_count) + "x" + std::to_string(expected.scenario_count));
    }
    truth = read_cells_csv(out_dir + "/ground_truth.csv", meta.dims);
    return 0;
  });

  CompleteResult result = complete_in_memory(config, space, truth);
  guarded("complete", [&] {
    write_mask_csv(out_dir + "/mask.csv", result.mask);
    write_mask_meta(out_dir + "/mask_meta.json", config.sampling, result.mask);
    write_model_json(out_dir + "/model.json", result.model);
    write_cells_csv(out_dir + "/prediction.csv", result.prediction);
    TimingReport timing = read_timing_json(out_dir + "/timing.json");
    timing.fit_seconds = result.fit_seconds;
    timing.predict_seconds = result.predict_seconds;
    write_timing_json(out_dir + "/timing.json", timing);
    write_manifest(out_dir, "complete",
                   {"mask.csv", "mask_meta.json", "model.json", "prediction.csv", "timing.json"});
    return 0;
  });
  return result;
}

EvaluationReport run_evaluate_stage(const ExperimentConfig& config, const std::string& out_dir) {
  TestSpace space;
  SafetyMatrix truth;
  SafetyMatrix prediction;
  SamplingMask mask;
  TimingReport timing;
  guarded("evaluate", [&] {
    space = build_test_space(config.space);
    const GroundTruthMeta meta = read_ground_truth_meta(out_dir + "/ground_truth_meta.json");
    const MatrixDims expected{space.fault_grid.value_count, space.fault_grid.time_step_count,
                              space.scenario_count()};
    if (meta.dims != expected) {
      throw std::invalid_argument("ground truth dims do not match the configured space");
    }
    truth = read_cells_csv(out_dir + "/ground_truth.csv", meta.dims);
    prediction = read_cells_csv(out_dir + "/prediction.csv", meta.dims);
    mask = read_mask(out_dir + "/mask.csv", out_dir + "/mask_meta.json");
    timing = read_timing_json(out_dir + "/timing.json");
    return 0;
  });

  EvaluationReport report = evaluate_in_memory(config, space, truth, mask, prediction, timing);
  guarded("evaluate", [&] {
    write_report_json(out_dir + "/report.json", report);
    write_report_text(out_dir + "/report.txt", report);
    write_scenario_heatmaps(out_dir, space, prediction.values, truth.values);
    write_timing_json(out_dir + "/timing.json", report.timing);
    std::vector<std::string> artifacts = {"report.json", "report.txt", "timing.json"};
    for (const std::string& name : heatmap_names(space)) artifacts.push_back(name);
    write_manifest(out_dir, "evaluate", artifacts);
    return 0;
  });
  return report;
}

EvaluationReport run_pipeline(const ExperimentConfig& config, const std::string& out_dir) {
  guarded("pipeline", [&] {
    ensure_directory(out_dir);
    return 0;
  });
  const SimulateResult simulated = simulate_in_memory(config);
  guarded("simulate", [&] {
    write_cells_csv(out_dir + "/ground_truth.csv", simulated.truth);
    write_ground_truth_meta(out_dir + "/ground_truth_meta.json", simulated.space,
                            config.simulation, config.idm, simulated.wall_seconds);
    return 0;
  });

  const CompleteResult completion = complete_in_memory(config, simulated.space, simulated.truth);
  guarded("complete", [&] {
    write_mask_csv(out_dir + "/mask.csv", completion.mask);
    write_mask_meta(out_dir + "/mask_meta.json", config.sampling, completion.mask);
    write_model_json(out_dir + "/model.json", completion.model);
    write_cells_csv(out_dir + "/prediction.csv", completion.prediction);
    return 0;
  });

  TimingReport timing;
  timing.simulation_seconds = simulated.wall_seconds;
  timing.fit_seconds = completion.fit_seconds;
  timing.predict_seconds = completion.predict_seconds;
  EvaluationReport report = evaluate_in_memory(config, simulated.space, simulated.truth,
                                               completion.mask, completion.prediction, timing);
  guarded("evaluate", [&] {
    write_report_json(out_dir + "/report.json", report);
    write_report_text(out_dir + "/report.txt", report);
    write_scenario_heatmaps(out_dir, simulated.space, completion.prediction.values,
                            simulated.truth.values);
    write_timing_json(out_dir + "/timing.json", report.timing);
    std::vector<std::string> artifacts = {
        "ground_truth.csv", "ground_truth_meta.json", "mask.csv",   "mask_meta.json",
        "model.json",       "prediction.csv",         "report.json", "report.txt",
        "timing.json"};
    for (const std::string& name : heatmap_names(simulated.space)) artifacts.push_back(name);
    write_manifest(out_dir, "pipeline", artifacts);
    return 0;
  });
  return report;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const std::string& out_dir,
                                const std::string& parameter,
                                const std::vector<double>& values) {
  return guarded("sweep", [&] {
    if (parameter != "rank" && parameter != "lambda1" && parameter != "lambda2" &&
        parameter != "lambda3") {
      throw std::invalid_argument("unknown sweep parameter \"" + parameter +
                                  "\" (expected rank|lambda1|lambda2|lambda3)");
    }
    for (const double value : values) {
      if (!(value > 0.0)) {
        throw std::invalid_argument("sweep values must be positive");
      }
      if (parameter == "rank" && std::floor(value) != value) {
        throw std::invalid_argument("rank sweep values must be integers");
      }
    }
    ensure_directory(out_dir);

    std::vector<SweepRow> rows;
    if (!values.empty()) {
      const SimulateResult simulated = simulate_in_memory(config);
      const EvalCellSet reference_cells = [&] {
        const SamplingMask mask = build_sampling_mask(simulated.space, config.sampling);
        const EvalCellSet cells = evaluation_cell_set(mask, config.evaluation.mode);
        if (cells.empty()) {
          throw std::invalid_argument(
              "empty evaluation set (every cell is observed; nothing to predict)");
        }
        return cells;
      }();
      for (const double value : values) {
        ExperimentConfig variant = config;
        if (parameter == "rank") {
          variant.solver.rank = static_cast<int>(value);
        } else if (parameter == "lambda1") {
          variant.solver.lambda1 = value;
        } else if (parameter == "lambda2") {
          variant.solver.lambda2 = value;
        } else {
          variant.solver.lambda3 = value;
        }
        const CompleteResult completion =
            complete_in_memory(variant, simulated.space, simulated.truth);
        const MetricsBlock block =
            metrics_block(completion.prediction.values, simulated.truth.values, reference_cells);
        rows.push_back({parameter, value, block.regression.mae, block.regression.wmape,
                        block.classification.precision, block.classification.f1});
      }
    }
    write_sweep_csv(out_dir + "/sweep.csv", rows);
    write_manifest(out_dir, "sweep", {"sweep.csv"});
    return rows;
  });
}

}  // namespace fita
