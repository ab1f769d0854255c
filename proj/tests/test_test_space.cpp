#include "fita/test_space.hpp"

#include <gtest/gtest.h>

#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace {

using fita::FaultGrid;
using fita::FunctionalScenario;
using fita::ScenarioKind;
using fita::SpaceConfig;
using fita::TestSpace;

FunctionalScenario cut_in_family(double min, double max, double step) {
  FunctionalScenario f;
  f.id = 0;
  f.kind = ScenarioKind::kCutIn;
  f.parameter_min = min;
  f.parameter_max = max;
  f.parameter_step = step;
  return f;
}

FunctionalScenario car_following_family(double min, double max, double step) {
  FunctionalScenario f;
  f.id = 1;
  f.kind = ScenarioKind::kCarFollowing;
  f.parameter_min = min;
  f.parameter_max = max;
  f.parameter_step = step;
  return f;
}

// The reference configuration: cut-in distances 5-13 m, car-following
// distances 16-25 m (1 m steps), 50 fault values x 50 injection steps.
SpaceConfig reference_config() {
  SpaceConfig config;
  config.functional_scenarios = {cut_in_family(5.0, 13.0, 1.0),
                                 car_following_family(16.0, 25.0, 1.0)};
  config.fault_grid.value_min = 0.0;
  config.fault_grid.value_step = 0.1;
  config.fault_grid.value_count = 50;
  config.fault_grid.time_step_count = 50;
  return config;
}

TEST(TestSpace, ReferenceConfigCounts) {
  const TestSpace space = fita::build_test_space(reference_config());
  EXPECT_EQ(space.scenario_count(), 19);  // 9 cut-in + 10 car-following
  EXPECT_EQ(space.fault_grid.value_count, 50);
  EXPECT_EQ(space.fault_grid.time_step_count, 50);
  EXPECT_EQ(space.cell_count(), 47500);  // 50 * 50 * 19
}

TEST(TestSpace, ReferenceConfigEnumerationOrder) {
  const TestSpace space = fita::build_test_space(reference_config());
  ASSERT_EQ(space.scenarios.size(), 19u);
  // Cut-in scenarios occupy ids 0-8 with distances 5..13.
  for (int i = 0; i < 9; ++i) {
    EXPECT_EQ(space.scenarios[i].global_index, i);
    EXPECT_EQ(space.scenarios[i].functional_id, 0);
    EXPECT_EQ(space.scenarios[i].kind, ScenarioKind::kCutIn);
    EXPECT_DOUBLE_EQ(space.scenarios[i].parameter_value, 5.0 + i);
  }
  // Car-following scenarios occupy ids 9-18 with distances 16..25.
  for (int i = 0; i < 10; ++i) {
    const auto& s = space.scenarios[9 + i];
    EXPECT_EQ(s.global_index, 9 + i);
    EXPECT_EQ(s.functional_id, 1);
    EXPECT_EQ(s.kind, ScenarioKind::kCarFollowing);
    EXPECT_DOUBLE_EQ(s.parameter_value, 16.0 + i);
  }
}

TEST(TestSpace, EnumerationIsDuplicateFree) {
  const TestSpace space = fita::build_test_space(reference_config());
  std::set<std::pair<int, double>> keys;
  for (const auto& s : space.scenarios) {
    keys.insert({s.functional_id, s.parameter_value});
  }
  EXPECT_EQ(static_cast<int>(keys.size()), space.scenario_count());
}

TEST(TestSpace, SinglePointRange) {
  SpaceConfig config = reference_config();
  config.functional_scenarios = {cut_in_family(7.0, 7.0, 1.0)};
  const TestSpace space = fita::build_test_space(config);
  EXPECT_EQ(space.scenario_count(), 1);
  EXPECT_DOUBLE_EQ(space.scenarios[0].parameter_value, 7.0);
}

TEST(TestSpace, StepTwoEnumeration) {
  SpaceConfig config = reference_config();
  config.functional_scenarios = {cut_in_family(5.0, 13.0, 2.0)};
  const TestSpace space = fita::build_test_space(config);
  ASSERT_EQ(space.scenario_count(), 5);
  const std::vector<double> expected = {5.0, 7.0, 9.0, 11.0, 13.0};
  for (int i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(space.scenarios[i].parameter_value, expected[i]);
  }
}

TEST(TestSpace, LatticeValuesComputedNotAccumulated) {
  // 0.1 is not exactly representable; min + index*step must still hit the
  // same double every time regardless of position.
  SpaceConfig config = reference_config();
  config.functional_scenarios = {cut_in_family(0.1, 10.0, 0.1)};
  const TestSpace space = fita::build_test_space(config);
  ASSERT_EQ(space.scenario_count(), 100);
  EXPECT_DOUBLE_EQ(space.scenarios[99].parameter_value, 0.1 + 99 * 0.1);
}

TEST(TestSpace, InvalidRangeRejected) {
  SpaceConfig config = reference_config();
  config.functional_scenarios = {cut_in_family(13.0, 5.0, 1.0)};
  EXPECT_THROW(fita::build_test_space(config), std::invalid_argument);
}

TEST(TestSpace, NonPositiveStepRejected) {
  SpaceConfig config = reference_config();
  config.functional_scenarios = {cut_in_family(5.0, 13.0, 0.0)};
  EXPECT_THROW(fita::build_test_space(config), std::invalid_argument);
  config.functional_scenarios = {cut_in_family(5.0, 13.0, -1.0)};
  EXPECT_THROW(fita::build_test_space(config), std::invalid_argument);
}

TEST(TestSpace, InvalidGridRejected) {
  SpaceConfig config = reference_config();
  config.fault_grid.value_count = 0;
  EXPECT_THROW(fita::build_test_space(config), std::invalid_argument);
  config = reference_config();
  config.fault_grid.value_step = 0.0;
  EXPECT_THROW(fita::build_test_space(config), std::invalid_argument);
}

TEST(FaultGridAt, ReferenceCorners) {
  const TestSpace space = fita::build_test_space(reference_config());
  const auto origin = space.fault_grid.at(0, 0);
  EXPECT_DOUBLE_EQ(origin.first, 0.0);
  EXPECT_EQ(origin.second, 0);
  const auto corner = space.fault_grid.at(49, 49);
  EXPECT_DOUBLE_EQ(corner.first, 4.9);
  EXPECT_EQ(corner.second, 49);
}

TEST(FaultGridAt, InteriorCell) {
  const TestSpace space = fita::build_test_space(reference_config());
  const auto cell = space.fault_grid.at(10, 5);
  EXPECT_DOUBLE_EQ(cell.first, 1.0);  // 0 + 10 * 0.1
  EXPECT_EQ(cell.second, 5);
}

TEST(FaultGridAt, OutOfRangeRejected) {
  const TestSpace space = fita::build_test_space(reference_config());
  EXPECT_THROW(space.fault_grid.at(-1, 0), std::out_of_range);
  EXPECT_THROW(space.fault_grid.at(0, -1), std::out_of_range);
  EXPECT_THROW(space.fault_grid.at(50, 0), std::out_of_range);
  EXPECT_THROW(space.fault_grid.at(0, 50), std::out_of_range);
}

TEST(FaultGridAt, BijectionOverLattice) {
  FaultGrid grid;
  grid.value_min = 0.0;
  grid.value_step = 0.1;
  grid.value_count = 7;
  grid.time_step_count = 5;
  std::set<std::pair<double, int>> seen;
  for (int i = 0; i < grid.value_count; ++i) {
    for (int j = 0; j < grid.time_step_count; ++j) {
      seen.insert(grid.at(i, j));
    }
  }
  EXPECT_EQ(seen.size(), 35u);
}

TEST(ScenarioKindNames, RoundTrip) {
  EXPECT_EQ(fita::to_string(ScenarioKind::kCutIn), "cut_in");
  EXPECT_EQ(fita::to_string(ScenarioKind::kCarFollowing), "car_following");
  EXPECT_EQ(fita::scenario_kind_from_string("cut_in"), ScenarioKind::kCutIn);
  EXPECT_EQ(fita::scenario_kind_from_string("car_following"), ScenarioKind::kCarFollowing);
  EXPECT_THROW(fita::scenario_kind_from_string("hover"), std::invalid_argument);
}

}  // namespace
