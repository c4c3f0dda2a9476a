#pragma once

// Inexact augmented Lagrangian for
//
//     min  gamma ||A||_1 + ||B||_*   s.t.  P_Phi(A + B) = P_Phi(C).
//
// The constraint is split as A + B = D with D free off Phi and pinned to the
// data on Phi, which gives a closed-form update for every block:
//
//     B <- svt(D - A + Y/mu, 1/mu)
//     A <- soft_threshold(D - B + Y/mu, gamma/mu)
//     D <- P_Phi(C) + P_Phi^c(A + B - Y/mu)
//     Y <- Y + mu (D - A - B)
//     mu <- min(growth * mu, cap)

#include <lrme/entry_set.hpp>
#include <lrme/linops.hpp>
#include <lrme/types.hpp>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace lrme {

template <typename Scalar>
struct SolverConfig {
  Scalar gamma = Scalar(0.1);
  std::optional<Scalar> penalty_init;  // nullopt = 1.25 / ||P_Phi(C)||
  Scalar penalty_growth = Scalar(1.5);
  std::optional<Scalar> penalty_cap;   // nullopt = 1e7 * penalty_init
  Scalar tol = Scalar(1e-8);
  int max_iter = 1000;

  void validate() const {
    if (!(gamma > Scalar(0))) throw ArgumentError("solver: gamma must be positive");
    if (penalty_init && !(*penalty_init > Scalar(0)))
      throw ArgumentError("solver: penalty_init must be positive");
    if (!(penalty_growth > Scalar(1))) throw ArgumentError("solver: penalty_growth must be > 1");
    if (penalty_cap && !(*penalty_cap > Scalar(0)))
      throw ArgumentError("solver: penalty_cap must be positive");
    if (!(tol > Scalar(0))) throw ArgumentError("solver: tol must be positive");
    if (max_iter < 1) throw ArgumentError("solver: max_iter must be >= 1");
  }
};

template <typename Scalar>
struct SolverResult {
  Matrix<Scalar> A_hat;
  Matrix<Scalar> B_hat;
  int iterations = 0;
  std::vector<Scalar> residual_history;
  bool converged = false;
  Scalar objective = Scalar(0);  // gamma ||A_hat||_1 + ||B_hat||_*
};

template <typename Derived>
SolverResult<typename Derived::Scalar> solve(const Eigen::MatrixBase<Derived>& observed,
                                             const EntrySet& phi,
                                             const SolverConfig<typename Derived::Scalar>& config) {
  using Scalar = typename Derived::Scalar;
  using MatrixType = Matrix<Scalar>;
  config.validate();
  require_finite(observed, "solve");
  const MatrixType data = project_entries(observed, phi);
  if (data != observed.derived()) {
    throw ArgumentError("solve: observed data must be zero outside Phi");
  }
  const EntrySet unobserved = phi.complement();

  const Scalar data_norm = data.norm();
  const Scalar scale = std::max(Scalar(1), data_norm);
  Scalar mu;
  if (config.penalty_init) {
    mu = *config.penalty_init;
  } else {
    const Scalar spectral = op_norm(data);
    mu = spectral > Scalar(0) ? Scalar(1.25) / spectral : Scalar(1.25);
  }
  const Scalar mu_cap = config.penalty_cap ? *config.penalty_cap : Scalar(1e7) * mu;

  MatrixType a = MatrixType::Zero(data.rows(), data.cols());
  MatrixType b = a;
  MatrixType y = a;
  MatrixType d = data;

  SolverResult<Scalar> result;
  for (int it = 1; it <= config.max_iter; ++it) {
    const Scalar inv_mu = Scalar(1) / mu;
    b = svt(d - a + inv_mu * y, inv_mu);
    a = soft_threshold(d - b + inv_mu * y, config.gamma * inv_mu);
    d = data + project_entries(a + b - inv_mu * y, unobserved);
    const MatrixType gap = d - a - b;
    y += mu * gap;
    mu = std::min(config.penalty_growth * mu, mu_cap);

    const Scalar residual = gap.norm() / scale;
    if (!std::isfinite(residual) || !y.allFinite()) {
      throw NumericalError("solve: non-finite iterate at iteration " + std::to_string(it));
    }
    result.residual_history.push_back(residual);
    result.iterations = it;
    if (residual < config.tol) {
      result.converged = true;
      break;
    }
  }

  result.A_hat = project_entries(a, phi);
  result.B_hat = std::move(b);
  result.objective = config.gamma * l1_norm(result.A_hat) + nuclear_norm(result.B_hat);
  return result;
}

/// ||B_hat - B*||_F / ||B*||_F, or ||B_hat||_F when B* = 0.
template <typename A, typename B>
typename A::Scalar relative_error(const Eigen::MatrixBase<A>& b_hat,
                                  const Eigen::MatrixBase<B>& b_star) {
  require_same_shape(b_hat, b_star, "relative_error");
  const auto denom = b_star.norm();
  const auto diff = (b_hat - b_star).norm();
  return denom == 0 ? b_hat.norm() : diff / denom;
}

template <typename Scalar, typename B>
bool is_success(const SolverResult<Scalar>& result, const Eigen::MatrixBase<B>& b_star,
                Scalar threshold = Scalar(1e-6)) {
  return result.converged && relative_error(result.B_hat, b_star) < threshold;
}

}  // namespace lrme
