#include "fita/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace fita {
namespace {

const FunctionalScenario& functional_by_id(const TestSpace& space, int functional_id) {
  for (const FunctionalScenario& functional : space.functional_scenarios) {
    if (functional.id == functional_id) return functional;
  }
  throw std::invalid_argument("baselines: unknown functional scenario id " +
                              std::to_string(functional_id));
}

}  // namespace

double FeatureVector::squared_distance(const FeatureVector& other) const {
  double sum = 0.0;
  for (std::size_t c = 0; c < components.size(); ++c) {
    const double d = components[c] - other.components[c];
    sum += d * d;
  }
  return sum;
}

FeatureVector encode_cell(const TestSpace& space, int row, int column) {
  const MatrixDims dims{space.fault_grid.value_count, space.fault_grid.time_step_count,
                        space.scenario_count()};
  if (row < 0 || row >= dims.rows() || column < 0 || column >= dims.columns()) {
    throw std::out_of_range("encode_cell: cell (" + std::to_string(row) + ", " +
                            std::to_string(column) + ") outside the matrix");
  }
  const auto [step, scenario_index] = dims.split_column(column);
  const ConcreteScenario& scenario = space.scenarios[static_cast<std::size_t>(scenario_index)];
  const FunctionalScenario& functional = functional_by_id(space, scenario.functional_id);

  const double span = functional.parameter_max - functional.parameter_min;
  FeatureVector features;
  features.components[0] =
      span > 0.0 ? (scenario.parameter_value - functional.parameter_min) / span : 0.0;
  features.components[1] = scenario.kind == ScenarioKind::kCutIn ? 1.0 : 0.0;
  features.components[2] =
      dims.step_count > 1 ? static_cast<double>(step) / (dims.step_count - 1) : 0.0;
  features.components[3] =
      dims.value_count > 1 ? static_cast<double>(row) / (dims.value_count - 1) : 0.0;
  return features;
}

std::vector<TrainingPoint> build_training_set(const TestSpace& space, const SafetyMatrix& truth,
                                              const SamplingMask& mask) {
  if (truth.dims != mask.dims) {
    throw std::invalid_argument("build_training_set: truth dims do not match mask dims");
  }
  std::vector<TrainingPoint> train;
  train.reserve(mask.observed.size());
  for (const auto& [row, column] : mask.observed) {
    train.push_back({encode_cell(space, row, column), truth.values(row, column)});
  }
  return train;
}

double knn_predict(const std::vector<TrainingPoint>& train, const FeatureVector& query, int k) {
  if (train.empty()) throw std::invalid_argument("knn_predict: empty training set");
  if (k < 1) throw std::invalid_argument("knn_predict: k must be >= 1");
  const int effective_k = std::min<int>(k, static_cast<int>(train.size()));

  // (distance, insertion index) pairs; the index is the documented
  // tie-break.
  std::vector<std::pair<double, int>> order(train.size());
  for (std::size_t n = 0; n < train.size(); ++n) {
    order[n] = {query.squared_distance(train[n].features), static_cast<int>(n)};
  }
  std::nth_element(order.begin(), order.begin() + (effective_k - 1), order.end());

  double sum = 0.0;
  for (int n = 0; n < effective_k; ++n) {
    sum += train[static_cast<std::size_t>(order[static_cast<std::size_t>(n)].second)].value;
  }
  return sum / effective_k;
}

double mean_predict(const std::vector<TrainingPoint>& train) {
  if (train.empty()) throw std::invalid_argument("mean_predict: empty training set");
  double sum = 0.0;
  for (const TrainingPoint& point : train) sum += point.value;
  return sum / static_cast<double>(train.size());
}

Eigen::MatrixXd knn_complete(const TestSpace& space, const SafetyMatrix& truth,
                             const SamplingMask& mask, int k) {
  const std::vector<TrainingPoint> train = build_training_set(space, truth, mask);
  const MatrixDims& dims = truth.dims;
  Eigen::MatrixXd prediction(dims.rows(), dims.columns());
  for (int column = 0; column < dims.columns(); ++column) {
    for (int row = 0; row < dims.rows(); ++row) {
      prediction(row, column) = knn_predict(train, encode_cell(space, row, column), k);
    }
  }
  return prediction;
}

Eigen::MatrixXd mean_complete(const TestSpace& space, const SafetyMatrix& truth,
                              const SamplingMask& mask) {
  const double mean = mean_predict(build_training_set(space, truth, mask));
  return Eigen::MatrixXd::Constant(truth.dims.rows(), truth.dims.columns(), mean);
}

}  // namespace fita
