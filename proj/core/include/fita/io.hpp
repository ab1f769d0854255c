#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "fita/config.hpp"
#include "fita/data_org.hpp"
#include "fita/evaluation.hpp"
#include "fita/simulator.hpp"
#include "fita/srmf.hpp"
#include "fita/test_space.hpp"

namespace fita {

/// Shortest exact decimal rendering (round-trips bit-for-bit), used for
/// every floating-point CSV field so staged runs reproduce in-memory runs.
std::string format_double(double value);

void ensure_directory(const std::string& path);

/// Cell-list CSV: scenario_index, fault_value_index, injection_step_index,
/// safety_indicator. Used for ground truth and for predictions.
void write_cells_csv(const std::string& path, const SafetyMatrix& matrix);

/// Reads a cell-list CSV and folds it; throws with path and line number on
/// the first parse failure, and on missing/duplicate cells.
SafetyMatrix read_cells_csv(const std::string& path, const MatrixDims& dims);

struct GroundTruthMeta {
  MatrixDims dims;
  double wall_seconds = 0.0;
};

void write_ground_truth_meta(const std::string& path, const TestSpace& space,
                             const SimulationParameters& sim, const IdmParameters& idm,
                             double wall_seconds);
GroundTruthMeta read_ground_truth_meta(const std::string& path);

/// Mask CSV of (row, col) pairs plus a JSON sidecar carrying the plan,
/// seed, dims, and per-scenario tested flags.
void write_mask_csv(const std::string& path, const SamplingMask& mask);
void write_mask_meta(const std::string& path, const SamplingPlan& plan, const SamplingMask& mask);
SamplingMask read_mask(const std::string& csv_path, const std::string& meta_path);

/// Factor model as JSON: dims, hyperparameters, shift, row-major factor
/// payloads, and the objective trace.
void write_model_json(const std::string& path, const SrmfModel& model);
SrmfModel read_model_json(const std::string& path);

void write_report_json(const std::string& path, const EvaluationReport& report);
void write_report_text(const std::string& path, const EvaluationReport& report);

/// Timing lives in its own file so determinism checks can ignore it
/// mechanically. Missing fields read back as zero.
void write_timing_json(const std::string& path, const TimingReport& timing);
TimingReport read_timing_json(const std::string& path);

/// Per-scenario I x J grids, scenario_<id>_pred.csv / scenario_<id>_truth.csv
/// (rows = fault value indices, columns = injection steps).
void write_scenario_heatmaps(const std::string& directory, const TestSpace& space,
                             const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth);

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  double mae = 0.0;
  double wmape = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

/// Written last by every command; its presence marks a complete artifact
/// set, so leftovers without one are partial.
void write_manifest(const std::string& directory, const std::string& command,
                    const std::vector<std::string>& artifacts);

}  // namespace fita
