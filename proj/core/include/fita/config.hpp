#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "fita/data_org.hpp"
#include "fita/evaluation.hpp"
#include "fita/simulator.hpp"
#include "fita/srmf.hpp"
#include "fita/test_space.hpp"

namespace fita {

struct EvaluationConfig {
  EvalMode mode = EvalMode::kUntestedOnly;
  double rare_threshold = 0.1;

  void validate() const;
};

/// Full experiment description. The global seed propagates to the sampling
/// and solver sections unless those set their own (tracked by the two
/// *_seed_explicit flags so a later global override respects them).
struct ExperimentConfig {
  SpaceConfig space;
  IdmParameters idm;
  SimulationParameters simulation;
  SamplingPlan sampling;
  SrmfOptions solver;
  EvaluationConfig evaluation;
  std::vector<std::string> baselines = {"knn", "mean"};
  int knn_k = 5;
  std::string output_directory = "out";
  std::uint64_t seed = 0;
  bool sampling_seed_explicit = false;
  bool solver_seed_explicit = false;

  void validate() const;
  /// Re-applies the global seed to sections without an explicit one.
  void propagate_seed();
};

/// The bundled default: the standard two-family space (cut-in 5-13 m,
/// car-following 16-25 m, 50 fault values x 50 injection steps), documented
/// simulator defaults, interval-2/3 sampling at fractions 0.2/0.1, and the
/// reference solver hyperparameters.
ExperimentConfig default_config();

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Parses, propagates seeds, and validates. Throws with the path and the
/// first failure on unreadable or ill-formed files.
ExperimentConfig load_config(const std::string& path);

}  // namespace fita
