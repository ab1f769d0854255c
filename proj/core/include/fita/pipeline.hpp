#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "fita/config.hpp"
#include "fita/evaluation.hpp"
#include "fita/io.hpp"
#include "fita/simulator.hpp"
#include "fita/srmf.hpp"

namespace fita {

/// Error carrying the pipeline stage it came from; the CLI prints it as
/// "[stage] message" and exits nonzero.
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& message)
      : std::runtime_error("[" + stage + "] " + message), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct SimulateResult {
  TestSpace space;
  SafetyMatrix truth;
  double wall_seconds = 0.0;
};

struct CompleteResult {
  SamplingMask mask;
  SrmfModel model;
  SafetyMatrix prediction;  // inverse-shifted (original units)
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;
};

/// In-memory stages (no file IO); the *_stage wrappers add artifact
/// persistence around them. Baseline predictors are recomputed inside the
/// evaluation stage (they are cheap pure functions of truth + mask).
SimulateResult simulate_in_memory(const ExperimentConfig& config);
CompleteResult complete_in_memory(const ExperimentConfig& config, const TestSpace& space,
                                  const SafetyMatrix& truth);
EvaluationReport evaluate_in_memory(const ExperimentConfig& config, const TestSpace& space,
                                    const SafetyMatrix& truth, const SamplingMask& mask,
                                    const SafetyMatrix& prediction, const TimingReport& timing);

/// Staged commands operating on a shared output directory. Each reads its
/// inputs from disk (except simulate), writes its artifacts, and finishes
/// with a manifest. Chaining the three reproduces run_pipeline outputs
/// byte-for-byte aside from timing.
SimulateResult run_simulate_stage(const ExperimentConfig& config, const std::string& out_dir);
CompleteResult run_complete_stage(const ExperimentConfig& config, const std::string& out_dir);
EvaluationReport run_evaluate_stage(const ExperimentConfig& config, const std::string& out_dir);

/// simulate -> fold -> mask -> sample -> shift -> fit -> predict ->
/// inverse shift -> evaluate (SRMF plus each enabled baseline), writing all
/// stage artifacts into out_dir.
EvaluationReport run_pipeline(const ExperimentConfig& config, const std::string& out_dir);

/// One fit/evaluation per value with the simulation reused; parameter is
/// one of rank, lambda1, lambda2, lambda3. Writes sweep.csv. An empty value
/// list yields a header-only table.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const std::string& out_dir,
                                const std::string& parameter, const std::vector<double>& values);

}  // namespace fita
