#include "fita/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace fita {
namespace {

void check_cell_shapes(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth,
                       const EvalCellSet& cells) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) {
    throw std::invalid_argument("evaluation: prediction and truth shapes differ");
  }
  for (const auto& [row, column] : cells) {
    if (row < 0 || row >= pred.rows() || column < 0 || column >= pred.cols()) {
      throw std::out_of_range("evaluation: cell (" + std::to_string(row) + ", " +
                              std::to_string(column) + ") outside the matrices");
    }
  }
}

std::string format_cell(double value, int width) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%*.4f", width, value);
  return buffer;
}

}  // namespace

std::string to_string(EvalMode mode) {
  return mode == EvalMode::kUntestedOnly ? "untested_only" : "all";
}

EvalMode eval_mode_from_string(const std::string& text) {
  if (text == "untested_only" || text == "untested") return EvalMode::kUntestedOnly;
  if (text == "all") return EvalMode::kAll;
  throw std::invalid_argument("unknown evaluation mode: \"" + text +
                              "\" (expected untested|all)");
}

EvalCellSet evaluation_cell_set(const SamplingMask& mask, EvalMode mode) {
  EvalCellSet cells;
  const int rows = mask.dims.rows();
  const int columns = mask.dims.columns();
  if (mode == EvalMode::kAll) {
    cells.reserve(static_cast<std::size_t>(rows) * columns);
    for (int row = 0; row < rows; ++row) {
      for (int column = 0; column < columns; ++column) cells.emplace_back(row, column);
    }
    return cells;
  }
  // Complement of the observed set; mask.observed is sorted (row, col).
  cells.reserve(static_cast<std::size_t>(rows) * columns - mask.observed.size());
  std::size_t next = 0;
  for (int row = 0; row < rows; ++row) {
    for (int column = 0; column < columns; ++column) {
      if (next < mask.observed.size() && mask.observed[next] == std::make_pair(row, column)) {
        ++next;
        continue;
      }
      cells.emplace_back(row, column);
    }
  }
  return cells;
}

RegressionMetrics regression_metrics(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth,
                                     const EvalCellSet& cells) {
  if (cells.empty()) throw std::invalid_argument("regression_metrics: empty evaluation set");
  check_cell_shapes(pred, truth, cells);
  double abs_error = 0.0;
  double abs_truth = 0.0;
  for (const auto& [row, column] : cells) {
    abs_error += std::abs(pred(row, column) - truth(row, column));
    abs_truth += std::abs(truth(row, column));
  }
  if (abs_truth == 0.0) {
    throw std::runtime_error(
        "regression_metrics: WMAPE undefined (sum |truth| is zero over the evaluation set)");
  }
  return {abs_error / static_cast<double>(cells.size()), abs_error / abs_truth};
}

ClassificationMetrics classification_metrics(const Eigen::MatrixXd& pred,
                                             const Eigen::MatrixXd& truth,
                                             const EvalCellSet& cells) {
  if (cells.empty()) throw std::invalid_argument("classification_metrics: empty evaluation set");
  check_cell_shapes(pred, truth, cells);
  ClassificationMetrics metrics;
  for (const auto& [row, column] : cells) {
    const bool predicted = pred(row, column) > 0.0;
    const bool actual = truth(row, column) > 0.0;
    if (predicted && actual) ++metrics.true_positives;
    if (predicted && !actual) ++metrics.false_positives;
    if (!predicted && actual) ++metrics.false_negatives;
  }
  const long predicted_positives = metrics.true_positives + metrics.false_positives;
  const long actual_positives = metrics.true_positives + metrics.false_negatives;
  metrics.precision = predicted_positives > 0
                          ? static_cast<double>(metrics.true_positives) / predicted_positives
                          : 0.0;
  metrics.recall = actual_positives > 0
                       ? static_cast<double>(metrics.true_positives) / actual_positives
                       : 0.0;
  metrics.f1 = metrics.precision + metrics.recall > 0.0
                   ? 2.0 * metrics.precision * metrics.recall /
                         (metrics.precision + metrics.recall)
                   : 0.0;
  return metrics;
}

MetricsBlock metrics_block(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth,
                           const EvalCellSet& cells) {
  MetricsBlock block;
  block.cell_count = static_cast<long>(cells.size());
  if (cells.empty()) {
    block.wmape_defined = false;
    return block;
  }
  block.classification = classification_metrics(pred, truth, cells);
  double abs_error = 0.0;
  double abs_truth = 0.0;
  for (const auto& [row, column] : cells) {
    abs_error += std::abs(pred(row, column) - truth(row, column));
    abs_truth += std::abs(truth(row, column));
  }
  block.regression.mae = abs_error / static_cast<double>(cells.size());
  if (abs_truth > 0.0) {
    block.regression.wmape = abs_error / abs_truth;
  } else {
    block.wmape_defined = false;
  }
  return block;
}

MethodReport scenario_breakdown(const std::string& method, const Eigen::MatrixXd& pred,
                                const Eigen::MatrixXd& truth, const TestSpace& space,
                                const SamplingMask& mask, const EvalCellSet& cells,
                                double rare_threshold) {
  const MatrixDims& dims = mask.dims;
  if (space.scenario_count() != dims.scenario_count) {
    throw std::invalid_argument("scenario_breakdown: space does not match mask dims");
  }
  check_cell_shapes(pred, truth, cells);

  std::vector<EvalCellSet> cells_by_scenario(static_cast<std::size_t>(dims.scenario_count));
  EvalCellSet existing_cells;
  EvalCellSet new_cells;
  for (const auto& cell : cells) {
    const int scenario = dims.split_column(cell.second).second;
    cells_by_scenario[static_cast<std::size_t>(scenario)].push_back(cell);
    if (mask.scenario_tested[static_cast<std::size_t>(scenario)]) {
      existing_cells.push_back(cell);
    } else {
      new_cells.push_back(cell);
    }
  }

  MethodReport report;
  report.method = method;
  report.overall = metrics_block(pred, truth, cells);
  report.existing = metrics_block(pred, truth, existing_cells);
  report.new_block = metrics_block(pred, truth, new_cells);

  const double cells_per_scenario = static_cast<double>(dims.rows()) * dims.step_count;
  for (int s = 0; s < dims.scenario_count; ++s) {
    ScenarioRow row;
    row.scenario_index = s;
    row.functional_id = space.scenarios[static_cast<std::size_t>(s)].functional_id;
    row.parameter_value = space.scenarios[static_cast<std::size_t>(s)].parameter_value;
    row.tested = mask.scenario_tested[static_cast<std::size_t>(s)] != 0;

    long criticals = 0;
    for (int j = 0; j < dims.step_count; ++j) {
      const int column = dims.column_of(j, s);
      for (int i = 0; i < dims.rows(); ++i) {
        if (truth(i, column) > 0.0) ++criticals;
      }
    }
    row.critical_rate = static_cast<double>(criticals) / cells_per_scenario;
    row.rare = row.critical_rate > 0.0 && row.critical_rate < rare_threshold;
    row.evaluated_cells =
        static_cast<long>(cells_by_scenario[static_cast<std::size_t>(s)].size());
    row.metrics = metrics_block(pred, truth, cells_by_scenario[static_cast<std::size_t>(s)]);
    report.scenarios.push_back(row);
  }
  return report;
}

double acceleration_rate(double simulation_seconds, double model_seconds) {
  if (!(model_seconds > 0.0)) {
    throw std::invalid_argument("acceleration_rate: model_seconds must be positive");
  }
  return simulation_seconds / model_seconds;
}

std::string render_report_text(const EvaluationReport& report) {
  std::ostringstream out;
  out << "Fault-injection completion report\n";
  out << "=================================\n";
  out << "mode: " << to_string(report.mode) << "    rare threshold: " << report.rare_threshold
      << "\n";
  out << "cells: total " << report.total_cells << ", observed " << report.observed_cells
      << ", evaluated " << report.evaluated_cells << "\n";
  char timing[256];
  std::snprintf(timing, sizeof(timing),
                "timing: simulation %.3f s (evaluated-cell share %.3f s), fit %.3f s, "
                "predict %.6f s, acceleration rate %.1f\n\n",
                report.timing.simulation_seconds, report.timing.simulation_seconds_eval_cells,
                report.timing.fit_seconds, report.timing.predict_seconds,
                report.timing.acceleration_rate);
  out << timing;

  out << "method   block      cells       MAE     WMAPE   precision    recall        F1\n";
  out << "------   --------   ------   -------   -------   ---------   -------   -------\n";
  const auto block_line = [&out](const std::string& method, const std::string& name,
                                 const MetricsBlock& block) {
    char line[256];
    std::snprintf(line, sizeof(line), "%-6s   %-8s   %6ld   %7.4f   %7s   %9.4f   %7.4f   %7.4f\n",
                  method.c_str(), name.c_str(), block.cell_count, block.regression.mae,
                  block.wmape_defined ? format_cell(block.regression.wmape, 7).c_str() : "     --",
                  block.classification.precision, block.classification.recall,
                  block.classification.f1);
    out << line;
  };
  for (const MethodReport& method : report.methods) {
    block_line(method.method, "overall", method.overall);
    block_line(method.method, "existing", method.existing);
    block_line(method.method, "new", method.new_block);
  }

  for (const MethodReport& method : report.methods) {
    out << "\nper-scenario (" << method.method << "):\n";
    out << "  id   func   parameter   tested   crit_rate   rare   cells       MAE        F1\n";
    for (const ScenarioRow& row : method.scenarios) {
      char line[256];
      std::snprintf(line, sizeof(line),
                    "%4d   %4d   %9.2f   %6s   %9.4f   %4s   %5ld   %7.4f   %7.4f\n",
                    row.scenario_index, row.functional_id, row.parameter_value,
                    row.tested ? "yes" : "no", row.critical_rate, row.rare ? "yes" : "no",
                    row.evaluated_cells, row.metrics.regression.mae,
                    row.metrics.classification.f1);
      out << line;
    }
  }
  return out.str();
}

}  // namespace fita
