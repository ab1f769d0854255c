#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "fita/test_space.hpp"

namespace fita {

/// Shape of the folded matrix: I rows (fault values) by M = J*K columns,
/// column m = j*K + s for injection step j and scenario s.
struct MatrixDims {
  int value_count = 0;     // I
  int step_count = 0;      // J
  int scenario_count = 0;  // K

  int rows() const { return value_count; }
  int columns() const { return step_count * scenario_count; }  // M
  int column_of(int step, int scenario) const { return step * scenario_count + scenario; }
  /// Inverse of column_of: (injection step, scenario).
  std::pair<int, int> split_column(int column) const {
    return {column / scenario_count, column % scenario_count};
  }
  bool operator==(const MatrixDims&) const = default;
};

/// One simulated (or predicted) cell: scenario s, fault value index i,
/// injection step index j, safety indicator x.
struct CellValue {
  int scenario = 0;
  int value_index = 0;
  int step_index = 0;
  double value = 0.0;
};

struct SafetyMatrix {
  Eigen::MatrixXd values;  // I x M
  MatrixDims dims;
  double shift_applied = 0.0;  // 0 if raw
};

/// Arranges one value per (scenario, i, j) cell into the I x M matrix.
/// Throws if any cell is missing or duplicated.
SafetyMatrix fold(const std::vector<CellValue>& cells, const MatrixDims& dims);

/// Inverse of fold; cells ordered by (scenario, value_index, step_index).
std::vector<CellValue> unfold(const SafetyMatrix& matrix);

/// Per-functional-scenario sampling: concrete scenarios at local index
/// == anchor (mod interval) are tested; within each tested scenario a
/// fraction of the I*J fault cells is drawn uniformly at random.
struct FunctionalSamplingPlan {
  int tested_interval = 1;
  double tested_fraction = 1.0;  // r
};

struct SamplingPlan {
  std::vector<FunctionalSamplingPlan> per_functional;  // aligned with TestSpace families
  int anchor_offset = 0;
  std::uint64_t seed = 0;
};

struct SamplingMask {
  MatrixDims dims;
  std::vector<std::pair<int, int>> observed;  // sorted (row, col) pairs
  std::vector<char> scenario_tested;          // per concrete scenario
  std::vector<double> scenario_fraction;      // r per concrete scenario (0 if untested)

  std::int64_t observed_count() const { return static_cast<std::int64_t>(observed.size()); }
  /// Dense I x M boolean view of the observed set.
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> flags() const;
};

SamplingMask build_sampling_mask(const TestSpace& space, const SamplingPlan& plan);

/// Keeps observed entries, zeroes everything else (the sampling operator).
SafetyMatrix apply_sampling(const SafetyMatrix& matrix, const SamplingMask& mask);

/// Adds c to the observed entries only. Throws if min observed value + c <= 0.
SafetyMatrix shift_to_positive(const SafetyMatrix& matrix, const SamplingMask& mask, double shift);

/// Subtracts c from every entry of a completed matrix.
SafetyMatrix inverse_shift(const SafetyMatrix& matrix, double shift);

}  // namespace fita
