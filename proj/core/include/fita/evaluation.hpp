#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "fita/data_org.hpp"
#include "fita/test_space.hpp"

namespace fita {

enum class EvalMode { kUntestedOnly, kAll };

std::string to_string(EvalMode mode);
EvalMode eval_mode_from_string(const std::string& text);

/// Cells metrics are computed over: complement of the observed set by
/// default, or every cell in "all" mode.
using EvalCellSet = std::vector<std::pair<int, int>>;  // (row, column), sorted

EvalCellSet evaluation_cell_set(const SamplingMask& mask, EvalMode mode);

struct RegressionMetrics {
  double mae = 0.0;
  double wmape = 0.0;
};

/// MAE = mean |pred - truth|; WMAPE = sum |pred - truth| / sum |truth|.
/// Throws on an empty cell set or when sum |truth| is zero.
RegressionMetrics regression_metrics(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth,
                                     const EvalCellSet& cells);

struct ClassificationMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long true_positives = 0;
  long false_positives = 0;
  long false_negatives = 0;
};

/// Critical iff value > 0 (strict) on both sides. Zero-denominator
/// conventions: precision = 0 with no predicted positives, recall = 0 with
/// no true positives, F1 = 0 when precision + recall = 0. Throws on an
/// empty cell set.
ClassificationMetrics classification_metrics(const Eigen::MatrixXd& pred,
                                             const Eigen::MatrixXd& truth,
                                             const EvalCellSet& cells);

struct MetricsBlock {
  long cell_count = 0;
  RegressionMetrics regression;
  ClassificationMetrics classification;
  bool wmape_defined = true;  // false when sum |truth| = 0 over the block
};

/// Metrics over a cell set; never throws on degenerate inputs. An empty
/// cell set or an all-zero truth block yields zeroed metrics with
/// wmape_defined = false (per-scenario rows and the existing/new split can
/// both be legitimately empty).
MetricsBlock metrics_block(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth,
                           const EvalCellSet& cells);

struct ScenarioRow {
  int scenario_index = 0;
  int functional_id = 0;
  double parameter_value = 0.0;
  bool tested = false;            // had observed cells under the plan
  double critical_rate = 0.0;     // truth criticals / (I*J)
  bool rare = false;              // 0 < critical_rate < rare_threshold
  long evaluated_cells = 0;
  MetricsBlock metrics;           // over this scenario's evaluated cells
};

struct MethodReport {
  std::string method;      // "srmf", "knn", "mean"
  MetricsBlock overall;
  MetricsBlock existing;   // scenarios with observed cells
  MetricsBlock new_block;  // scenarios without observed cells
  std::vector<ScenarioRow> scenarios;
};

struct TimingReport {
  double simulation_seconds = 0.0;           // full ground-truth sweep
  double simulation_seconds_eval_cells = 0.0;  // scaled to the evaluated cells
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;
  double acceleration_rate = 0.0;
};

struct EvaluationReport {
  EvalMode mode = EvalMode::kUntestedOnly;
  double rare_threshold = 0.1;
  long total_cells = 0;
  long observed_cells = 0;
  long evaluated_cells = 0;
  std::vector<MethodReport> methods;  // SRMF first, then enabled baselines
  TimingReport timing;
};

/// Per-scenario rows plus the existing/new aggregation for one method.
MethodReport scenario_breakdown(const std::string& method, const Eigen::MatrixXd& pred,
                                const Eigen::MatrixXd& truth, const TestSpace& space,
                                const SamplingMask& mask, const EvalCellSet& cells,
                                double rare_threshold);

/// simulation_seconds / model_seconds. Throws when model_seconds <= 0.
double acceleration_rate(double simulation_seconds, double model_seconds);

/// Aligned-text rendering of the report (the human-readable artifact).
std::string render_report_text(const EvaluationReport& report);

}  // namespace fita
