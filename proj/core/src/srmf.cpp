#include "fita/srmf.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fita/rng.hpp"

namespace fita {
namespace {

// Keeps every block system strictly positive definite even at rho = 0.
constexpr double kJitter = 1e-8;

double effective_rho(const SrmfOptions& options) { return std::max(options.rho, kJitter); }

void check_state_dims(const Eigen::MatrixXd& x, const SrmfState& state) {
  if (state.w.cols() != x.rows() || state.h.cols() != x.cols() ||
      state.w.rows() != state.h.rows()) {
    throw std::invalid_argument("srmf: factor shapes do not match the data matrix");
  }
}

}  // namespace

void SrmfOptions::validate() const {
  if (rank < 1) throw std::invalid_argument("solver: rank must be >= 1");
  if (rho < 0.0 || lambda1 < 0.0 || lambda2 < 0.0 || lambda3 < 0.0) {
    throw std::invalid_argument("solver: regularization weights must be >= 0");
  }
  if (ar_order < 1 || ar_order > 4) {
    throw std::invalid_argument("solver: ar_order must lie in [1, 4]");
  }
  if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be >= 1");
  if (rel_tol < 0.0) throw std::invalid_argument("solver: rel_tol must be >= 0");
  if (!(init_stddev > 0.0)) throw std::invalid_argument("solver: init_stddev must be positive");
}

Eigen::SparseMatrix<double> scenario_difference_operator(const MatrixDims& dims) {
  const int m = dims.columns();
  if (m < 2) throw std::invalid_argument("scenario difference operator needs at least 2 columns");
  Eigen::SparseMatrix<double> psi(m - 1, m);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(2 * (m - 1)));
  for (int q = 0; q < m - 1; ++q) {
    triplets.emplace_back(q, q, -1.0);
    triplets.emplace_back(q, q + 1, 1.0);
  }
  psi.setFromTriplets(triplets.begin(), triplets.end());
  return psi;
}

Eigen::SparseMatrix<double> scenario_difference_operator(const MatrixDims& dims,
                                                         const SrmfOptions& options) {
  const int m = dims.columns();
  if (m < 2) throw std::invalid_argument("scenario difference operator needs at least 2 columns");
  const std::vector<char> active = scenario_pair_activity(dims, options);
  Eigen::SparseMatrix<double> psi(m - 1, m);
  std::vector<Eigen::Triplet<double>> triplets;
  for (int q = 0; q < m - 1; ++q) {
    if (!active[static_cast<std::size_t>(q)]) continue;
    triplets.emplace_back(q, q, -1.0);
    triplets.emplace_back(q, q + 1, 1.0);
  }
  psi.setFromTriplets(triplets.begin(), triplets.end());
  return psi;
}

Eigen::SparseMatrix<double> time_difference_operator(const MatrixDims& dims) {
  const int m = dims.columns();
  const int k = dims.scenario_count;
  if (k < 1 || m % k != 0) {
    throw std::invalid_argument("time difference operator: columns must be a multiple of K");
  }
  if (m < 2 * k) {
    throw std::invalid_argument("time difference operator needs at least 2 injection steps");
  }
  Eigen::SparseMatrix<double> psi(m - k, m);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(2 * (m - k)));
  for (int q = 0; q < m - k; ++q) {
    triplets.emplace_back(q, q, -1.0);
    triplets.emplace_back(q, q + k, 1.0);
  }
  psi.setFromTriplets(triplets.begin(), triplets.end());
  return psi;
}

Eigen::SparseMatrix<double> ar_selector(int value_count, int ar_order, int lag) {
  if (ar_order < 1 || ar_order >= value_count) {
    throw std::invalid_argument("ar_selector: need 1 <= ar_order < value_count");
  }
  if (lag < 0 || lag > ar_order) {
    throw std::invalid_argument("ar_selector: lag must lie in [0, ar_order]");
  }
  Eigen::SparseMatrix<double> psi(value_count - ar_order, value_count);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(value_count - ar_order));
  for (int q = 0; q < value_count - ar_order; ++q) {
    triplets.emplace_back(q, ar_order - lag + q, 1.0);
  }
  psi.setFromTriplets(triplets.begin(), triplets.end());
  return psi;
}

std::vector<char> scenario_pair_activity(const MatrixDims& dims, const SrmfOptions& options) {
  const int m = dims.columns();
  const int k = dims.scenario_count;
  std::vector<char> active(m > 0 ? static_cast<std::size_t>(m - 1) : 0, 1);
  if (!options.mask_cross_block_smoothness) return active;
  if (!options.scenario_groups.empty() &&
      static_cast<int>(options.scenario_groups.size()) != k) {
    throw std::invalid_argument("solver: scenario_groups size must equal the scenario count");
  }
  for (int q = 0; q < m - 1; ++q) {
    const int scenario = q % k;
    if (scenario == k - 1) {
      active[static_cast<std::size_t>(q)] = 0;  // next column starts a new injection-step block
    } else if (!options.scenario_groups.empty() &&
               options.scenario_groups[static_cast<std::size_t>(scenario)] !=
                   options.scenario_groups[static_cast<std::size_t>(scenario + 1)]) {
      active[static_cast<std::size_t>(q)] = 0;  // crosses a functional-scenario boundary
    }
  }
  return active;
}

ObservedIndex build_observed_index(const SamplingMask& mask) {
  ObservedIndex observed;
  observed.rows_of_column.resize(static_cast<std::size_t>(mask.dims.columns()));
  observed.columns_of_row.resize(static_cast<std::size_t>(mask.dims.rows()));
  for (const auto& [row, column] : mask.observed) {
    if (row < 0 || row >= mask.dims.rows() || column < 0 || column >= mask.dims.columns()) {
      throw std::invalid_argument("srmf: observed index outside matrix bounds");
    }
    observed.rows_of_column[static_cast<std::size_t>(column)].push_back(row);
    observed.columns_of_row[static_cast<std::size_t>(row)].push_back(column);
  }
  return observed;
}

namespace {

double objective_with_rho(const Eigen::MatrixXd& x, const ObservedIndex& observed,
                          const SrmfState& state, const SrmfOptions& options,
                          const MatrixDims& dims, double rho) {
  check_state_dims(x, state);
  const int columns = static_cast<int>(x.cols());
  const int rows = static_cast<int>(x.rows());
  const int k = dims.scenario_count;
  const int l = static_cast<int>(state.t.size());

  double data = 0.0;
  for (int m = 0; m < columns; ++m) {
    for (const int i : observed.rows_of_column[static_cast<std::size_t>(m)]) {
      const double residual = x(i, m) - state.w.col(i).dot(state.h.col(m));
      data += residual * residual;
    }
  }

  double value = 0.5 * data + 0.5 * rho * (state.w.squaredNorm() + state.h.squaredNorm());

  if (options.lambda1 > 0.0 && columns >= 2) {
    const std::vector<char> active = scenario_pair_activity(dims, options);
    double smooth = 0.0;
    for (int m = 0; m < columns - 1; ++m) {
      if (!active[static_cast<std::size_t>(m)]) continue;
      smooth += (state.h.col(m + 1) - state.h.col(m)).squaredNorm();
    }
    value += 0.5 * options.lambda1 * smooth;
  }
  if (options.lambda2 > 0.0 && columns > k) {
    double smooth = 0.0;
    for (int m = 0; m + k < columns; ++m) {
      smooth += (state.h.col(m + k) - state.h.col(m)).squaredNorm();
    }
    value += 0.5 * options.lambda2 * smooth;
  }
  if (options.lambda3 > 0.0 && l >= 1 && rows > l) {
    double ar = 0.0;
    for (int i = l; i < rows; ++i) {
      Eigen::VectorXd residual = state.w.col(i);
      for (int u = 1; u <= l; ++u) {
        residual.noalias() -= state.t[static_cast<std::size_t>(u - 1)] * state.w.col(i - u);
      }
      ar += residual.squaredNorm();
    }
    value += 0.5 * options.lambda3 * ar;
  }
  return value;
}

}  // namespace

double srmf_objective(const Eigen::MatrixXd& x, const ObservedIndex& observed,
                      const SrmfState& state, const SrmfOptions& options,
                      const MatrixDims& dims) {
  return objective_with_rho(x, observed, state, options, dims, options.rho);
}

void update_h(const Eigen::MatrixXd& x, const ObservedIndex& observed, SrmfState& state,
              const SrmfOptions& options, const MatrixDims& dims) {
  check_state_dims(x, state);
  const int rank = static_cast<int>(state.h.rows());
  const int columns = static_cast<int>(x.cols());
  const int k = dims.scenario_count;
  const double rho = effective_rho(options);
  const std::vector<char> active = scenario_pair_activity(dims, options);

  Eigen::MatrixXd lhs(rank, rank);
  Eigen::VectorXd rhs(rank);
  for (int m = 0; m < columns; ++m) {
    lhs = rho * Eigen::MatrixXd::Identity(rank, rank);
    rhs.setZero();
    for (const int i : observed.rows_of_column[static_cast<std::size_t>(m)]) {
      lhs.noalias() += state.w.col(i) * state.w.col(i).transpose();
      rhs.noalias() += x(i, m) * state.w.col(i);
    }
    if (options.lambda1 > 0.0) {
      if (m >= 1 && active[static_cast<std::size_t>(m - 1)]) {
        lhs.diagonal().array() += options.lambda1;
        rhs.noalias() += options.lambda1 * state.h.col(m - 1);
      }
      if (m + 1 < columns && active[static_cast<std::size_t>(m)]) {
        lhs.diagonal().array() += options.lambda1;
        rhs.noalias() += options.lambda1 * state.h.col(m + 1);
      }
    }
    if (options.lambda2 > 0.0) {
      if (m - k >= 0) {
        lhs.diagonal().array() += options.lambda2;
        rhs.noalias() += options.lambda2 * state.h.col(m - k);
      }
      if (m + k < columns) {
        lhs.diagonal().array() += options.lambda2;
        rhs.noalias() += options.lambda2 * state.h.col(m + k);
      }
    }
    state.h.col(m) = lhs.ldlt().solve(rhs);
  }
}

void update_w(const Eigen::MatrixXd& x, const ObservedIndex& observed, SrmfState& state,
              const SrmfOptions& options) {
  check_state_dims(x, state);
  const int rank = static_cast<int>(state.w.rows());
  const int rows = static_cast<int>(x.rows());
  const int l = static_cast<int>(state.t.size());
  const double rho = effective_rho(options);
  const bool with_ar = options.lambda3 > 0.0 && l >= 1 && rows > l;

  Eigen::MatrixXd lhs(rank, rank);
  Eigen::VectorXd rhs(rank);
  for (int i = 0; i < rows; ++i) {
    lhs = rho * Eigen::MatrixXd::Identity(rank, rank);
    rhs.setZero();
    for (const int m : observed.columns_of_row[static_cast<std::size_t>(i)]) {
      lhs.noalias() += state.h.col(m) * state.h.col(m).transpose();
      rhs.noalias() += x(i, m) * state.h.col(m);
    }
    if (with_ar) {
      if (i >= l) {
        // w_i is the target of its own AR residual.
        lhs.diagonal().array() += options.lambda3;
        Eigen::VectorXd lagged = Eigen::VectorXd::Zero(rank);
        for (int u = 1; u <= l; ++u) {
          lagged.noalias() += state.t[static_cast<std::size_t>(u - 1)] * state.w.col(i - u);
        }
        rhs.noalias() += options.lambda3 * lagged;
      }
      for (int u = 1; u <= l; ++u) {
        const int target = i + u;  // residual of w_target uses w_i through T_u
        if (target < l || target >= rows) continue;
        const Eigen::MatrixXd& t_u = state.t[static_cast<std::size_t>(u - 1)];
        Eigen::VectorXd partial = state.w.col(target);
        for (int v = 1; v <= l; ++v) {
          if (v == u) continue;
          partial.noalias() -= state.t[static_cast<std::size_t>(v - 1)] * state.w.col(target - v);
        }
        lhs.noalias() += options.lambda3 * t_u.transpose() * t_u;
        rhs.noalias() += options.lambda3 * t_u.transpose() * partial;
      }
    }
    state.w.col(i) = lhs.ldlt().solve(rhs);
  }
}

void update_t(SrmfState& state, const SrmfOptions& options) {
  const int rank = static_cast<int>(state.w.rows());
  const int rows = static_cast<int>(state.w.cols());
  const int l = static_cast<int>(state.t.size());
  if (options.lambda3 <= 0.0 || l < 1 || rows <= l) return;

  // Stacked least squares over G = [T_1 ... T_l]: minimize
  // || Y - G Z ||_F with Y = [w_l ... w_{I-1}] and Z stacking the lagged
  // blocks [w_{l-u} ... w_{I-1-u}] for u = 1..l.
  const int samples = rows - l;
  Eigen::MatrixXd y(rank, samples);
  Eigen::MatrixXd z(l * rank, samples);
  for (int q = 0; q < samples; ++q) {
    y.col(q) = state.w.col(l + q);
    for (int u = 1; u <= l; ++u) {
      z.block((u - 1) * rank, q, rank, 1) = state.w.col(l + q - u);
    }
  }
  const Eigen::MatrixXd gram = z * z.transpose();
  const Eigen::MatrixXd cross = z * y.transpose();
  Eigen::MatrixXd solution = gram.ldlt().solve(cross);  // (lR) x R, holds G^T
  const double scale = std::max(1.0, cross.norm());
  if (!solution.allFinite() || (gram * solution - cross).norm() > 1e-8 * scale) {
    // Rank-deficient normal equations (fewer samples than unknowns); a tiny
    // ridge keeps the solve deterministic.
    Eigen::MatrixXd jittered = gram;
    jittered.diagonal().array() += kJitter;
    solution = jittered.ldlt().solve(cross);
  }

  // Accept the candidate only if it does not worsen the AR residual; the
  // jittered fallback is not an exact minimizer, and the trace must stay
  // non-increasing.
  Eigen::MatrixXd previous(rank, l * rank);
  for (int u = 1; u <= l; ++u) {
    previous.block(0, (u - 1) * rank, rank, rank) = state.t[static_cast<std::size_t>(u - 1)];
  }
  const double cost_before = (y - previous * z).squaredNorm();
  const double cost_after = (y - solution.transpose() * z).squaredNorm();
  if (cost_after > cost_before) return;
  for (int u = 1; u <= l; ++u) {
    state.t[static_cast<std::size_t>(u - 1)] =
        solution.block((u - 1) * rank, 0, rank, rank).transpose();
  }
}

SrmfState initialize_state(const MatrixDims& dims, const SrmfOptions& options) {
  Rng rng(options.seed);
  SrmfState state;
  state.w.resize(options.rank, dims.rows());
  state.h.resize(options.rank, dims.columns());
  for (int i = 0; i < state.w.cols(); ++i) {
    for (int r = 0; r < state.w.rows(); ++r) {
      state.w(r, i) = rng.normal(0.0, options.init_stddev);
    }
  }
  for (int m = 0; m < state.h.cols(); ++m) {
    for (int r = 0; r < state.h.rows(); ++r) {
      state.h(r, m) = rng.normal(0.0, options.init_stddev);
    }
  }
  state.t.assign(static_cast<std::size_t>(options.ar_order),
                 Eigen::MatrixXd::Zero(options.rank, options.rank));
  return state;
}

SrmfModel fit_srmf(const SafetyMatrix& training, const SamplingMask& mask,
                   const SrmfOptions& options, double* fit_seconds) {
  options.validate();
  if (training.dims != mask.dims) {
    throw std::invalid_argument("fit_srmf: training dims do not match mask dims");
  }
  const MatrixDims& dims = training.dims;
  if (options.rank > std::min(dims.rows(), dims.columns())) {
    throw std::invalid_argument("fit_srmf: rank must not exceed min(rows, columns)");
  }
  if (options.ar_order >= dims.rows()) {
    throw std::invalid_argument("fit_srmf: ar_order must be smaller than the row count");
  }
  if (mask.observed.empty()) {
    throw std::invalid_argument("fit_srmf: the observed set is empty");
  }

  const auto start = std::chrono::steady_clock::now();
  const ObservedIndex observed = build_observed_index(mask);
  // The trace records the objective the sweeps actually minimize, i.e. with
  // the jittered rho; it coincides with srmf_objective whenever rho >= 1e-8.
  const double rho = effective_rho(options);
  SrmfModel model;
  model.dims = dims;
  model.options = options;
  model.shift = training.shift_applied;
  model.state = initialize_state(dims, options);
  model.objective_trace.push_back(
      objective_with_rho(training.values, observed, model.state, options, dims, rho));

  for (int sweep = 1; sweep <= options.max_iters; ++sweep) {
    update_h(training.values, observed, model.state, options, dims);
    update_w(training.values, observed, model.state, options);
    update_t(model.state, options);
    const double objective =
        objective_with_rho(training.values, observed, model.state, options, dims, rho);
    if (!std::isfinite(objective)) {
      throw std::runtime_error("fit_srmf: non-finite objective at sweep " +
                               std::to_string(sweep));
    }
    const double previous = model.objective_trace.back();
    model.objective_trace.push_back(objective);
    model.iterations = sweep;
    if (std::abs(previous - objective) <= options.rel_tol * std::max(1.0, std::abs(previous))) {
      model.converged = true;
      break;
    }
  }

  if (fit_seconds != nullptr) {
    *fit_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return model;
}

SafetyMatrix predict_completion(const SrmfModel& model, double* predict_seconds) {
  const auto start = std::chrono::steady_clock::now();
  SafetyMatrix prediction;
  prediction.dims = model.dims;
  prediction.values.noalias() = model.state.w.transpose() * model.state.h;
  prediction.values.array() -= model.shift;
  prediction.shift_applied = 0.0;
  if (!prediction.values.allFinite()) {
    throw std::runtime_error("predict_completion: non-finite entries in the reconstruction");
  }
  if (predict_seconds != nullptr) {
    *predict_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return prediction;
}

}  // namespace fita
