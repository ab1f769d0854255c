#include "fita/data_org.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fita/rng.hpp"
#include "fita/test_space.hpp"

namespace {

using fita::CellValue;
using fita::MatrixDims;
using fita::SafetyMatrix;
using fita::SamplingMask;
using fita::SamplingPlan;
using fita::TestSpace;

MatrixDims dims_of(int values, int steps, int scenarios) {
  MatrixDims dims;
  dims.value_count = values;
  dims.step_count = steps;
  dims.scenario_count = scenarios;
  return dims;
}

fita::SpaceConfig reference_space_config() {
  fita::FunctionalScenario cut_in;
  cut_in.id = 0;
  cut_in.kind = fita::ScenarioKind::kCutIn;
  cut_in.parameter_min = 5.0;
  cut_in.parameter_max = 13.0;
  cut_in.parameter_step = 1.0;
  fita::FunctionalScenario car_following;
  car_following.id = 1;
  car_following.kind = fita::ScenarioKind::kCarFollowing;
  car_following.parameter_min = 16.0;
  car_following.parameter_max = 25.0;
  car_following.parameter_step = 1.0;

  fita::SpaceConfig config;
  config.functional_scenarios = {cut_in, car_following};
  config.fault_grid.value_min = 0.0;
  config.fault_grid.value_step = 0.1;
  config.fault_grid.value_count = 50;
  config.fault_grid.time_step_count = 50;
  return config;
}

std::vector<CellValue> dense_cells(const MatrixDims& dims, fita::Rng& rng) {
  std::vector<CellValue> cells;
  for (int s = 0; s < dims.scenario_count; ++s) {
    for (int i = 0; i < dims.value_count; ++i) {
      for (int j = 0; j < dims.step_count; ++j) {
        cells.push_back({s, i, j, rng.normal()});
      }
    }
  }
  return cells;
}

TEST(MatrixDims, ColumnEncoding) {
  const MatrixDims dims = dims_of(50, 50, 19);
  EXPECT_EQ(dims.rows(), 50);
  EXPECT_EQ(dims.columns(), 950);
  EXPECT_EQ(dims.column_of(0, 0), 0);
  EXPECT_EQ(dims.column_of(1, 0), 19);  // next injection step starts a new K-block
  EXPECT_EQ(dims.column_of(0, 5), 5);
  for (int m = 0; m < dims.columns(); ++m) {
    const auto [step, scenario] = dims.split_column(m);
    EXPECT_EQ(dims.column_of(step, scenario), m);
  }
}

TEST(Fold, OriginCell) {
  const MatrixDims dims = dims_of(2, 2, 2);
  std::vector<CellValue> cells;
  fita::Rng rng(1);
  cells = dense_cells(dims, rng);
  for (auto& cell : cells) {
    if (cell.scenario == 0 && cell.value_index == 0 && cell.step_index == 0) {
      cell.value = 42.0;
    }
  }
  const SafetyMatrix folded = fita::fold(cells, dims);
  EXPECT_DOUBLE_EQ(folded.values(0, 0), 42.0);
}

TEST(Fold, ColumnPlacement) {
  const MatrixDims dims = dims_of(50, 50, 19);
  fita::Rng rng(2);
  std::vector<CellValue> cells = dense_cells(dims, rng);
  for (auto& cell : cells) {
    if (cell.scenario == 0 && cell.value_index == 0 && cell.step_index == 1) {
      cell.value = -3.5;
    }
  }
  const SafetyMatrix folded = fita::fold(cells, dims);
  EXPECT_DOUBLE_EQ(folded.values(0, 19), -3.5);  // m = j*K + s = 1*19 + 0
}

TEST(Fold, RoundTrip) {
  const MatrixDims dims = dims_of(3, 2, 2);
  fita::Rng rng(3);
  const std::vector<CellValue> cells = dense_cells(dims, rng);
  const std::vector<CellValue> back = fita::unfold(fita::fold(cells, dims));
  ASSERT_EQ(back.size(), cells.size());
  // unfold orders by (scenario, value, step); the generator already does.
  for (std::size_t i = 0; i < cells.size(); ++i) {
    EXPECT_EQ(back[i].scenario, cells[i].scenario);
    EXPECT_EQ(back[i].value_index, cells[i].value_index);
    EXPECT_EQ(back[i].step_index, cells[i].step_index);
    EXPECT_DOUBLE_EQ(back[i].value, cells[i].value);
  }
}

TEST(Fold, MissingCellRejected) {
  const MatrixDims dims = dims_of(2, 2, 1);
  fita::Rng rng(4);
  std::vector<CellValue> cells = dense_cells(dims, rng);
  cells.pop_back();
  try {
    fita::fold(cells, dims);
    FAIL() << "missing cell accepted";
  } catch (const std::invalid_argument& error) {
    EXPECT_NE(std::string(error.what()).find("missing"), std::string::npos) << error.what();
  }
}

TEST(Fold, DuplicateCellRejected) {
  const MatrixDims dims = dims_of(2, 2, 1);
  fita::Rng rng(5);
  std::vector<CellValue> cells = dense_cells(dims, rng);
  cells.push_back(cells.front());
  EXPECT_THROW(fita::fold(cells, dims), std::invalid_argument);
}

TEST(Fold, OutOfBoundsCellRejected) {
  const MatrixDims dims = dims_of(2, 2, 1);
  fita::Rng rng(6);
  std::vector<CellValue> cells = dense_cells(dims, rng);
  cells.front().scenario = 9;
  EXPECT_THROW(fita::fold(cells, dims), std::invalid_argument);
}

TEST(SamplingMaskBuild, ReferencePlan) {
  const TestSpace space = fita::build_test_space(reference_space_config());
  SamplingPlan plan;
  plan.per_functional = {{2, 0.2}, {3, 0.1}};
  plan.seed = 42;
  const SamplingMask mask = fita::build_sampling_mask(space, plan);

  // Tested scenarios: every 2nd cut-in (0,2,4,6,8), every 3rd car-following
  // (9,12,15,18).
  const std::set<int> expected_tested = {0, 2, 4, 6, 8, 9, 12, 15, 18};
  for (int s = 0; s < space.scenario_count(); ++s) {
    EXPECT_EQ(mask.scenario_tested[s] != 0, expected_tested.count(s) == 1) << "scenario " << s;
  }

  // 5 scenarios at 20% of 2500 cells + 4 scenarios at 10%.
  EXPECT_EQ(mask.observed_count(), 5 * 500 + 4 * 250);

  // No observation may fall into an untested scenario's columns.
  for (const auto& [row, col] : mask.observed) {
    const int scenario = mask.dims.split_column(col).second;
    EXPECT_TRUE(expected_tested.count(scenario) == 1) << "row " << row << " col " << col;
  }
}

TEST(SamplingMaskBuild, ObservedSortedAndUnique) {
  const TestSpace space = fita::build_test_space(reference_space_config());
  SamplingPlan plan;
  plan.per_functional = {{2, 0.2}, {3, 0.1}};
  plan.seed = 42;
  const SamplingMask mask = fita::build_sampling_mask(space, plan);
  for (std::size_t i = 1; i < mask.observed.size(); ++i) {
    EXPECT_LT(mask.observed[i - 1], mask.observed[i]);
  }
}

TEST(SamplingMaskBuild, FullObservation) {
  const TestSpace space = fita::build_test_space(reference_space_config());
  SamplingPlan plan;
  plan.per_functional = {{1, 1.0}, {1, 1.0}};
  plan.seed = 0;
  const SamplingMask mask = fita::build_sampling_mask(space, plan);
  EXPECT_EQ(mask.observed_count(), space.cell_count());
}

TEST(SamplingMaskBuild, DeterministicUnderSeed) {
  const TestSpace space = fita::build_test_space(reference_space_config());
  SamplingPlan plan;
  plan.per_functional = {{2, 0.2}, {3, 0.1}};
  plan.seed = 7;
  const SamplingMask a = fita::build_sampling_mask(space, plan);
  const SamplingMask b = fita::build_sampling_mask(space, plan);
  EXPECT_EQ(a.observed, b.observed);
  plan.seed = 8;
  const SamplingMask c = fita::build_sampling_mask(space, plan);
  EXPECT_NE(a.observed, c.observed);
}

TEST(SamplingMaskBuild, AnchorOffsetShiftsTestedScenarios) {
  const TestSpace space = fita::build_test_space(reference_space_config());
  SamplingPlan plan;
  plan.per_functional = {{2, 0.2}, {3, 0.1}};
  plan.anchor_offset = 1;
  plan.seed = 42;
  const SamplingMask mask = fita::build_sampling_mask(space, plan);
  const std::set<int> expected_tested = {1, 3, 5, 7, 10, 13, 16};
  for (int s = 0; s < space.scenario_count(); ++s) {
    EXPECT_EQ(mask.scenario_tested[s] != 0, expected_tested.count(s) == 1) << "scenario " << s;
  }
}

TEST(SamplingMaskBuild, PlanSizeMismatchRejected) {
  const TestSpace space = fita::build_test_space(reference_space_config());
  SamplingPlan plan;
  plan.per_functional = {{2, 0.2}};  // two families configured
  EXPECT_THROW(fita::build_sampling_mask(space, plan), std::invalid_argument);
}

TEST(ApplySampling, EmptyMaskZeroes) {
  const MatrixDims dims = dims_of(3, 2, 2);
  fita::Rng rng(8);
  SafetyMatrix matrix = fita::fold(dense_cells(dims, rng), dims);
  SamplingMask mask;
  mask.dims = dims;
  const SafetyMatrix projected = fita::apply_sampling(matrix, mask);
  EXPECT_TRUE((projected.values.array() == 0.0).all());
}

TEST(ApplySampling, FullMaskIdentity) {
  const MatrixDims dims = dims_of(3, 2, 2);
  fita::Rng rng(9);
  SafetyMatrix matrix = fita::fold(dense_cells(dims, rng), dims);
  SamplingMask mask;
  mask.dims = dims;
  for (int r = 0; r < dims.rows(); ++r) {
    for (int c = 0; c < dims.columns(); ++c) mask.observed.emplace_back(r, c);
  }
  const SafetyMatrix projected = fita::apply_sampling(matrix, mask);
  EXPECT_TRUE(projected.values.isApprox(matrix.values, 0.0));
}

TEST(ApplySampling, Idempotent) {
  const MatrixDims dims = dims_of(4, 3, 2);
  fita::Rng rng(10);
  SafetyMatrix matrix = fita::fold(dense_cells(dims, rng), dims);
  SamplingMask mask;
  mask.dims = dims;
  mask.observed = {{0, 0}, {1, 3}, {2, 5}, {3, 1}};
  const SafetyMatrix once = fita::apply_sampling(matrix, mask);
  const SafetyMatrix twice = fita::apply_sampling(once, mask);
  EXPECT_TRUE(once.values.isApprox(twice.values, 0.0));
}

TEST(ApplySampling, DimensionMismatchRejected) {
  const MatrixDims dims = dims_of(4, 3, 2);
  fita::Rng rng(11);
  SafetyMatrix matrix = fita::fold(dense_cells(dims, rng), dims);
  SamplingMask mask;
  mask.dims = dims_of(4, 3, 3);
  EXPECT_THROW(fita::apply_sampling(matrix, mask), std::invalid_argument);
}

TEST(Shift, AddsToObservedOnly) {
  const MatrixDims dims = dims_of(2, 2, 1);
  SafetyMatrix matrix;
  matrix.dims = dims;
  matrix.values.setZero(2, 2);
  matrix.values(0, 0) = -10.0;  // capped-TTC cell
  matrix.values(1, 1) = -4.0;
  SamplingMask mask;
  mask.dims = dims;
  mask.observed = {{0, 0}, {1, 1}};
  const SafetyMatrix shifted = fita::shift_to_positive(matrix, mask, 11.0);
  EXPECT_DOUBLE_EQ(shifted.values(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(shifted.values(1, 1), 7.0);
  EXPECT_DOUBLE_EQ(shifted.values(0, 1), 0.0);  // unobserved cells untouched
  EXPECT_DOUBLE_EQ(shifted.values(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(shifted.shift_applied, 11.0);
}

TEST(Shift, RoundTripOnObserved) {
  const MatrixDims dims = dims_of(4, 3, 2);
  fita::Rng rng(12);
  SafetyMatrix matrix = fita::fold(dense_cells(dims, rng), dims);
  SamplingMask mask;
  mask.dims = dims;
  mask.observed = {{0, 0}, {1, 2}, {2, 4}, {3, 5}};
  const SafetyMatrix shifted = fita::shift_to_positive(matrix, mask, 20.0);
  const SafetyMatrix back = fita::inverse_shift(shifted, 20.0);
  for (const auto& [row, col] : mask.observed) {
    // (x + 20) - 20 re-rounds, so the round trip is exact only to ~1 ulp of 20.
    EXPECT_NEAR(back.values(row, col), matrix.values(row, col), 1e-12);
  }
  EXPECT_DOUBLE_EQ(back.shift_applied, 0.0);
}

TEST(Shift, InsufficientShiftRejected) {
  const MatrixDims dims = dims_of(2, 2, 1);
  SafetyMatrix matrix;
  matrix.dims = dims;
  matrix.values.setConstant(2, 2, -10.0);
  SamplingMask mask;
  mask.dims = dims;
  mask.observed = {{0, 0}};
  try {
    fita::shift_to_positive(matrix, mask, 10.0);  // -10 + 10 = 0, not positive
    FAIL() << "insufficient shift accepted";
  } catch (const std::invalid_argument& error) {
    EXPECT_NE(std::string(error.what()).find("-10"), std::string::npos) << error.what();
  }
}

TEST(Shift, CriticalityThresholdTranslation) {
  // After shifting by c, the criticality boundary x > 0 sits at value > c;
  // inverse-shifting a completed matrix restores the x > 0 test.
  const MatrixDims dims = dims_of(1, 2, 1);
  SafetyMatrix completed;
  completed.dims = dims;
  completed.values.resize(1, 2);
  completed.values << 11.5, 10.5;  // one critical, one not, at c = 11
  completed.shift_applied = 11.0;
  const SafetyMatrix restored = fita::inverse_shift(completed, 11.0);
  EXPECT_GT(restored.values(0, 0), 0.0);
  EXPECT_LT(restored.values(0, 1), 0.0);
}

TEST(MaskFlags, DenseViewMatchesObservedSet) {
  const TestSpace space = fita::build_test_space(reference_space_config());
  SamplingPlan plan;
  plan.per_functional = {{2, 0.2}, {3, 0.1}};
  plan.seed = 42;
  const SamplingMask mask = fita::build_sampling_mask(space, plan);
  const auto flags = mask.flags();
  std::int64_t set_count = 0;
  for (int r = 0; r < flags.rows(); ++r) {
    for (int c = 0; c < flags.cols(); ++c) {
      if (flags(r, c)) ++set_count;
    }
  }
  EXPECT_EQ(set_count, mask.observed_count());
}

}  // namespace
