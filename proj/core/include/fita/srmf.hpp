#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <vector>

#include "fita/data_org.hpp"

namespace fita {

/// Hyperparameters of the smoothness-regularized matrix factorization.
struct SrmfOptions {
  int rank = 10;          // R
  double rho = 0.01;      // ridge weight on W and H
  double lambda1 = 1.0;   // scenario smoothness
  double lambda2 = 1.0;   // injection-time smoothness
  double lambda3 = 10.0;  // autoregressive coupling along fault values
  int ar_order = 1;       // l, up to 4
  int max_iters = 150;
  double rel_tol = 1e-6;
  double init_stddev = 0.1;
  std::uint64_t seed = 0;
  // When true, adjacent-column smoothness pairs that straddle an
  // injection-time block boundary or a functional-scenario boundary are
  // dropped from the scenario-smoothness term.
  bool mask_cross_block_smoothness = false;
  // Functional-scenario id per scenario (size K); consulted only when
  // mask_cross_block_smoothness is true. Empty means one shared group.
  std::vector<int> scenario_groups;

  void validate() const;
};

/// Factor state: X ~= W^T H with W (R x I), H (R x M) and AR matrices
/// T_1..T_l (R x R each) tying consecutive columns of W.
struct SrmfState {
  Eigen::MatrixXd w;
  Eigen::MatrixXd h;
  std::vector<Eigen::MatrixXd> t;
};

struct SrmfModel {
  SrmfState state;
  MatrixDims dims;
  SrmfOptions options;
  double shift = 0.0;                  // shift applied to the training matrix
  std::vector<double> objective_trace;  // initial value, then one per sweep
  int iterations = 0;
  bool converged = false;
};

/// First-difference operator over adjacent columns (stride 1, neighbouring
/// scenarios): (M-1) x M with rows [.. -1 +1 ..].
Eigen::SparseMatrix<double> scenario_difference_operator(const MatrixDims& dims);

/// Masked variant: rows whose column pair crosses an injection-time block
/// or functional-scenario boundary are zeroed when the option is enabled.
Eigen::SparseMatrix<double> scenario_difference_operator(const MatrixDims& dims,
                                                         const SrmfOptions& options);

/// First-difference operator over columns K apart (neighbouring injection
/// steps of the same scenario): (M-K) x M.
Eigen::SparseMatrix<double> time_difference_operator(const MatrixDims& dims);

/// AR selector: (I-l) x I picking columns (l-u)..(I-1-u) of W, so that
/// W S_u^T stacks the lagged column blocks used by the AR penalty.
Eigen::SparseMatrix<double> ar_selector(int value_count, int ar_order, int lag);

/// Activity flag per adjacent column pair (m, m+1); all true unless
/// mask_cross_block_smoothness drops boundary-straddling pairs.
std::vector<char> scenario_pair_activity(const MatrixDims& dims, const SrmfOptions& options);

/// Observed cells grouped both ways for the alternating column solves.
struct ObservedIndex {
  std::vector<std::vector<int>> rows_of_column;  // size M
  std::vector<std::vector<int>> columns_of_row;  // size I
};

ObservedIndex build_observed_index(const SamplingMask& mask);

/// Full regularized objective (masked fit + ridge + smoothness + AR terms).
double srmf_objective(const Eigen::MatrixXd& x, const ObservedIndex& observed,
                      const SrmfState& state, const SrmfOptions& options,
                      const MatrixDims& dims);

/// Exact block-coordinate updates. Each call minimizes the objective in its
/// block (every H column / every W column / the stacked AR matrices) with
/// all other blocks fixed, sweeping columns in ascending order.
void update_h(const Eigen::MatrixXd& x, const ObservedIndex& observed, SrmfState& state,
              const SrmfOptions& options, const MatrixDims& dims);
void update_w(const Eigen::MatrixXd& x, const ObservedIndex& observed, SrmfState& state,
              const SrmfOptions& options);
void update_t(SrmfState& state, const SrmfOptions& options);

/// Seeded factor initialization: W, H entries i.i.d. N(0, init_stddev^2),
/// T_u = 0.
SrmfState initialize_state(const MatrixDims& dims, const SrmfOptions& options);

/// Alternating minimization on the shifted training matrix. Only observed
/// cells of `training` are read. Stops after max_iters sweeps or when the
/// relative objective decrease falls below rel_tol. Single-threaded and
/// deterministic given the seed.
SrmfModel fit_srmf(const SafetyMatrix& training, const SamplingMask& mask,
                   const SrmfOptions& options, double* fit_seconds = nullptr);

/// Dense reconstruction W^T H with the training shift removed, i.e. scores
/// in the original safety-indicator units.
SafetyMatrix predict_completion(const SrmfModel& model, double* predict_seconds = nullptr);

}  // namespace fita
