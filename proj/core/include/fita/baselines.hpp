#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "fita/data_org.hpp"
#include "fita/test_space.hpp"

namespace fita {

/// Normalized cell encoding shared by the reference predictors:
/// scenario parameter scaled to [0,1] inside its functional scenario,
/// a 0/1 scenario-kind flag, and the normalized injection step and fault
/// value indices.
struct FeatureVector {
  std::array<double, 4> components{};

  double squared_distance(const FeatureVector& other) const;
};

/// Feature encoding for one matrix cell (row = fault value index, column
/// encodes scenario and injection step).
FeatureVector encode_cell(const TestSpace& space, int row, int column);

struct TrainingPoint {
  FeatureVector features;
  double value = 0.0;
};

/// Observed cells of `truth` in mask order (row-major over the sorted
/// observed set), encoded for the baseline predictors.
std::vector<TrainingPoint> build_training_set(const TestSpace& space, const SafetyMatrix& truth,
                                              const SamplingMask& mask);

/// Mean of the k nearest training values under Euclidean distance. Ties
/// broken by lower training-insertion index; k is truncated to the
/// training-set size. Throws on an empty training set or k < 1.
double knn_predict(const std::vector<TrainingPoint>& train, const FeatureVector& query, int k);

/// Arithmetic mean of the training values, as a constant predictor.
/// Throws on an empty training set.
double mean_predict(const std::vector<TrainingPoint>& train);

/// Dense I x M prediction matrices over the whole test space.
Eigen::MatrixXd knn_complete(const TestSpace& space, const SafetyMatrix& truth,
                             const SamplingMask& mask, int k);
Eigen::MatrixXd mean_complete(const TestSpace& space, const SafetyMatrix& truth,
                              const SamplingMask& mask);

}  // namespace fita
