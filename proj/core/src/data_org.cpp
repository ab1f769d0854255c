#include "fita/data_org.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fita/rng.hpp"

namespace fita {
namespace {

void validate_dims(const MatrixDims& dims) {
  if (dims.value_count < 1 || dims.step_count < 1 || dims.scenario_count < 1) {
    throw std::invalid_argument("matrix dims must all be >= 1, got " +
                                std::to_string(dims.value_count) + " x " +
                                std::to_string(dims.step_count) + " x " +
                                std::to_string(dims.scenario_count));
  }
}

std::string cell_name(int scenario, int value_index, int step_index) {
  return "(scenario " + std::to_string(scenario) + ", value " + std::to_string(value_index) +
         ", step " + std::to_string(step_index) + ")";
}

}  // namespace

SafetyMatrix fold(const std::vector<CellValue>& cells, const MatrixDims& dims) {
  validate_dims(dims);
  SafetyMatrix matrix;
  matrix.dims = dims;
  matrix.values.setZero(dims.rows(), dims.columns());
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> seen(dims.rows(), dims.columns());
  seen.setConstant(false);

  for (const CellValue& cell : cells) {
    if (cell.scenario < 0 || cell.scenario >= dims.scenario_count || cell.value_index < 0 ||
        cell.value_index >= dims.value_count || cell.step_index < 0 ||
        cell.step_index >= dims.step_count) {
      throw std::invalid_argument(
          "fold: cell " + cell_name(cell.scenario, cell.value_index, cell.step_index) +
          " outside dims");
    }
    const int column = dims.column_of(cell.step_index, cell.scenario);
    if (seen(cell.value_index, column)) {
      throw std::invalid_argument(
          "fold: duplicate cell " + cell_name(cell.scenario, cell.value_index, cell.step_index));
    }
    seen(cell.value_index, column) = true;
    matrix.values(cell.value_index, column) = cell.value;
  }

  if (!seen.all()) {
    for (int column = 0; column < dims.columns(); ++column) {
      for (int row = 0; row < dims.rows(); ++row) {
        if (!seen(row, column)) {
          const auto [step, scenario] = dims.split_column(column);
          throw std::invalid_argument("fold: missing cell " + cell_name(scenario, row, step));
        }
      }
    }
  }
  return matrix;
}

std::vector<CellValue> unfold(const SafetyMatrix& matrix) {
  const MatrixDims& dims = matrix.dims;
  validate_dims(dims);
  if (matrix.values.rows() != dims.rows() || matrix.values.cols() != dims.columns()) {
    throw std::invalid_argument("unfold: value shape does not match dims");
  }
  std::vector<CellValue> cells;
  cells.reserve(static_cast<std::size_t>(dims.rows()) * dims.columns());
  for (int scenario = 0; scenario < dims.scenario_count; ++scenario) {
    for (int row = 0; row < dims.value_count; ++row) {
      for (int step = 0; step < dims.step_count; ++step) {
        cells.push_back({scenario, row, step, matrix.values(row, dims.column_of(step, scenario))});
      }
    }
  }
  return cells;
}

Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> SamplingMask::flags() const {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> result(dims.rows(), dims.columns());
  result.setConstant(false);
  for (const auto& [row, column] : observed) result(row, column) = true;
  return result;
}

SamplingMask build_sampling_mask(const TestSpace& space, const SamplingPlan& plan) {
  if (plan.per_functional.size() != space.functional_scenarios.size()) {
    throw std::invalid_argument("sampling plan: " + std::to_string(plan.per_functional.size()) +
                                " per-functional entries for " +
                                std::to_string(space.functional_scenarios.size()) + " families");
  }
  if (plan.anchor_offset < 0) {
    throw std::invalid_argument("sampling plan: anchor_offset must be >= 0");
  }
  for (std::size_t f = 0; f < plan.per_functional.size(); ++f) {
    const FunctionalSamplingPlan& family = plan.per_functional[f];
    if (family.tested_interval < 1) {
      throw std::invalid_argument("sampling plan: tested_interval must be >= 1 (family " +
                                  std::to_string(f) + ")");
    }
    if (family.tested_fraction < 0.0 || family.tested_fraction > 1.0) {
      throw std::invalid_argument("sampling plan: tested_fraction must lie in [0, 1] (family " +
                                  std::to_string(f) + ")");
    }
  }

  SamplingMask mask;
  mask.dims = {space.fault_grid.value_count, space.fault_grid.time_step_count,
               space.scenario_count()};
  mask.scenario_tested.assign(space.scenarios.size(), 0);
  mask.scenario_fraction.assign(space.scenarios.size(), 0.0);

  const int rows = mask.dims.value_count;
  const int steps = mask.dims.step_count;
  const std::int64_t cells_per_scenario = static_cast<std::int64_t>(rows) * steps;

  // One stream consumed in ascending global-scenario order keeps the mask a
  // pure function of (space, plan).
  Rng rng(plan.seed);
  int global = 0;
  for (std::size_t f = 0; f < space.functional_scenarios.size(); ++f) {
    const FunctionalSamplingPlan& family = plan.per_functional[f];
    const int n = space.functional_scenarios[f].count();
    for (int local = 0; local < n; ++local, ++global) {
      if (local % family.tested_interval != plan.anchor_offset % family.tested_interval) continue;
      mask.scenario_tested[static_cast<std::size_t>(global)] = 1;
      mask.scenario_fraction[static_cast<std::size_t>(global)] = family.tested_fraction;
      const std::int64_t wanted = std::llround(family.tested_fraction *
                                               static_cast<double>(cells_per_scenario));
      for (const std::int64_t flat : rng.sample_without_replacement(cells_per_scenario, wanted)) {
        const int row = static_cast<int>(flat / steps);
        const int step = static_cast<int>(flat % steps);
        mask.observed.emplace_back(row, mask.dims.column_of(step, global));
      }
    }
  }
  std::sort(mask.observed.begin(), mask.observed.end());
  return mask;
}

SafetyMatrix apply_sampling(const SafetyMatrix& matrix, const SamplingMask& mask) {
  if (matrix.dims != mask.dims) {
    throw std::invalid_argument("apply_sampling: matrix dims do not match mask dims");
  }
  SafetyMatrix result;
  result.dims = matrix.dims;
  result.shift_applied = matrix.shift_applied;
  result.values.setZero(matrix.values.rows(), matrix.values.cols());
  for (const auto& [row, column] : mask.observed) {
    result.values(row, column) = matrix.values(row, column);
  }
  return result;
}

SafetyMatrix shift_to_positive(const SafetyMatrix& matrix, const SamplingMask& mask,
                               double shift) {
  if (matrix.dims != mask.dims) {
    throw std::invalid_argument("shift_to_positive: matrix dims do not match mask dims");
  }
  if (!mask.observed.empty()) {
    double min_observed = std::numeric_limits<double>::infinity();
    for (const auto& [row, column] : mask.observed) {
      min_observed = std::min(min_observed, matrix.values(row, column));
    }
    if (!(min_observed + shift > 0.0)) {
      throw std::invalid_argument("shift_to_positive: shift " + std::to_string(shift) +
                                  " does not clear the minimum observed value " +
                                  std::to_string(min_observed));
    }
  }
  SafetyMatrix result = matrix;
  for (const auto& [row, column] : mask.observed) {
    result.values(row, column) += shift;
  }
  result.shift_applied = matrix.shift_applied + shift;
  return result;
}

SafetyMatrix inverse_shift(const SafetyMatrix& matrix, double shift) {
  SafetyMatrix result = matrix;
  result.values.array() -= shift;
  result.shift_applied = matrix.shift_applied - shift;
  return result;
}

}  // namespace fita
