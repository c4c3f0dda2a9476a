#pragma once

// Dense kernels shared by every module: tangent-space projections, the SVD,
// matrix norms and the two proximal maps used by the solver.
//
// Every function is pure: inputs are taken by const reference and a freshly
// allocated result is returned, so they can be called concurrently.

#include <lrme/entry_set.hpp>
#include <lrme/rng.hpp>
#include <lrme/types.hpp>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace lrme {

/// Column and row spaces of a rank-r matrix, T = {U X^T + Y V^T}.
template <typename Scalar>
class TangentSpace {
 public:
  using MatrixType = Matrix<Scalar>;

  TangentSpace() = default;

  /// Throws ArgumentError unless U^T U = I and V^T V = I to `tol` (max-abs).
  TangentSpace(MatrixType u, MatrixType v, Scalar tol = Scalar(1e-10))
      : u_(std::move(u)), v_(std::move(v)) {
    if (u_.cols() != v_.cols()) {
      throw DimensionError("TangentSpace: U has " + std::to_string(u_.cols()) +
                           " columns, V has " + std::to_string(v_.cols()));
    }
    require_finite(u_, "TangentSpace");
    require_finite(v_, "TangentSpace");
    const Index r = u_.cols();
    const MatrixType eye = MatrixType::Identity(r, r);
    if (r > 0) {
      const Scalar eu = (u_.transpose() * u_ - eye).cwiseAbs().maxCoeff();
      const Scalar ev = (v_.transpose() * v_ - eye).cwiseAbs().maxCoeff();
      if (eu > tol || ev > tol) {
        throw ArgumentError("TangentSpace: factors are not orthonormal (deviation " +
                            std::to_string(static_cast<double>(std::max(eu, ev))) + ")");
      }
    }
  }

  /// The rank-0 space; P_T is identically zero. Not usable for certificates.
  static TangentSpace empty(Index rows, Index cols) {
    return TangentSpace(MatrixType(rows, 0), MatrixType(cols, 0));
  }

  const MatrixType& U() const { return u_; }
  const MatrixType& V() const { return v_; }
  Index rank() const { return u_.cols(); }
  Index rows() const { return u_.rows(); }
  Index cols() const { return v_.rows(); }
  bool valid() const { return rank() > 0; }

  MatrixType uvt() const { return u_ * v_.transpose(); }

 private:
  MatrixType u_;
  MatrixType v_;
};

template <typename Scalar>
struct SvdResult {
  Matrix<Scalar> U;
  Vector<Scalar> singular_values;
  Matrix<Scalar> V;

  Index size() const { return singular_values.size(); }
  Matrix<Scalar> reconstruct() const {
    return U * singular_values.asDiagonal() * V.transpose();
  }
};

namespace detail {

template <typename Scalar, typename Derived>
void check_tangent_shape(const TangentSpace<Scalar>& t, const Eigen::MatrixBase<Derived>& m,
                         const char* where) {
  if (m.rows() != t.rows() || m.cols() != t.cols()) {
    throw DimensionError(std::string(where) + ": matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", tangent space acts on " +
                         std::to_string(t.rows()) + "x" + std::to_string(t.cols()));
  }
}

}  // namespace detail

/// P_T(M) = U U^T M + M V V^T - U U^T M V V^T, evaluated in O(n1 n2 r).
template <typename Scalar, typename Derived>
Matrix<Scalar> project_tangent(const TangentSpace<Scalar>& t, const Eigen::MatrixBase<Derived>& m) {
  detail::check_tangent_shape(t, m, "project_tangent");
  require_finite(m, "project_tangent");
  if (t.rank() == 0) return Matrix<Scalar>::Zero(m.rows(), m.cols());
  const Matrix<Scalar> utm = t.U().transpose() * m;  // r x n2
  const Matrix<Scalar> mv = m * t.V();                // n1 x r
  const Matrix<Scalar> core = utm * t.V();            // r x r
  Matrix<Scalar> out = t.U() * utm;
  out.noalias() += (mv - t.U() * core) * t.V().transpose();
  return out;
}

template <typename Scalar, typename Derived>
Matrix<Scalar> project_tangent_complement(const TangentSpace<Scalar>& t,
                                          const Eigen::MatrixBase<Derived>& m) {
  return m - project_tangent(t, m);
}

/// Economy SVD with a fixed sign convention: the largest-magnitude component
/// of every left singular vector is non-negative (lowest index wins ties).
template <typename Derived>
SvdResult<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using MatrixType = Matrix<Scalar>;
  require_finite(m, "svd");
  const Index k = std::min(m.rows(), m.cols());
  if (k == 0) {
    return {MatrixType(m.rows(), 0), Vector<Scalar>(0), MatrixType(m.cols(), 0)};
  }
  Eigen::BDCSVD<MatrixType> dec(m.derived(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    const auto sv = dec.singularValues();
    throw NumericalError("svd: decomposition did not converge on " + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()) + " input (max |m_ij| = " +
                         std::to_string(static_cast<double>(m.cwiseAbs().maxCoeff())) +
                         ", sigma range " + std::to_string(static_cast<double>(sv.maxCoeff())) +
                         " .. " + std::to_string(static_cast<double>(sv.minCoeff())) + ")");
  }
  SvdResult<Scalar> out{dec.matrixU(), dec.singularValues(), dec.matrixV()};
  for (Index c = 0; c < k; ++c) {
    Index best = 0;
    Scalar best_abs = std::abs(out.U(0, c));
    for (Index i = 1; i < out.U.rows(); ++i) {
      const Scalar a = std::abs(out.U(i, c));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (out.U(best, c) < Scalar(0)) {
      out.U.col(c) *= Scalar(-1);
      out.V.col(c) *= Scalar(-1);
    }
  }
  return out;
}

template <typename Derived>
typename Derived::Scalar nuclear_norm(const Eigen::MatrixBase<Derived>& m) {
  return svd(m).singular_values.sum();
}

template <typename Derived>
typename Derived::Scalar l1_norm(const Eigen::MatrixBase<Derived>& m) {
  require_finite(m, "l1_norm");
  return m.cwiseAbs().sum();
}

template <typename Derived>
typename Derived::Scalar inf_norm(const Eigen::MatrixBase<Derived>& m) {
  require_finite(m, "inf_norm");
  if (m.size() == 0) return 0;
  return m.cwiseAbs().maxCoeff();
}

template <typename Derived>
typename Derived::Scalar fro_norm(const Eigen::MatrixBase<Derived>& m) {
  require_finite(m, "fro_norm");
  return m.norm();
}

template <typename A, typename B>
typename A::Scalar inner(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  require_same_shape(a, b, "inner");
  return (a.derived().array() * b.derived().array()).sum();
}

/// sigma_max by power iteration on M^T M. Stops when the relative change of
/// the estimate falls below `tol`; throws ConvergenceError at `max_iter`.
template <typename Derived>
typename Derived::Scalar op_norm_power(const Eigen::MatrixBase<Derived>& m, double tol = 1e-9,
                                       int max_iter = 5000) {
  using Scalar = typename Derived::Scalar;
  require_finite(m, "op_norm_power");
  if (m.size() == 0) return 0;
  const Matrix<Scalar> a = m;
  Rng rng(0x5eedULL);
  std::normal_distribution<double> normal;
  Vector<Scalar> v(a.cols());
  for (Index i = 0; i < v.size(); ++i) v(i) = static_cast<Scalar>(normal(rng));
  v.normalize();
  Scalar est = (a * v).norm();
  if (est == Scalar(0)) {
    // Start vector in the null space; fall back to the exact answer.
    return svd(a).singular_values(0);
  }
  for (int it = 0; it < max_iter; ++it) {
    const Vector<Scalar> u = a * v;
    Vector<Scalar> w = a.transpose() * u;
    const Scalar wn = w.norm();
    if (wn == Scalar(0)) return 0;
    v = w / wn;
    const Scalar next = (a * v).norm();
    if (std::abs(next - est) <= Scalar(tol) * next) return next;
    est = next;
  }
  throw ConvergenceError("op_norm_power: no convergence after " + std::to_string(max_iter) +
                         " iterations (last estimate " +
                         std::to_string(static_cast<double>(est)) + ")");
}

/// Spectral norm: exact SVD when min(rows, cols) <= 64, power iteration above.
template <typename Derived>
typename Derived::Scalar op_norm(const Eigen::MatrixBase<Derived>& m) {
  if (std::min(m.rows(), m.cols()) <= 64) {
    const auto s = svd(m);
    return s.size() == 0 ? typename Derived::Scalar(0) : s.singular_values(0);
  }
  return op_norm_power(m);
}

/// Entrywise sign(m) * max(|m| - t, 0), the prox of t * ||.||_1.
template <typename Derived>
Matrix<typename Derived::Scalar> soft_threshold(const Eigen::MatrixBase<Derived>& m,
                                                typename Derived::Scalar t) {
  using Scalar = typename Derived::Scalar;
  if (!(t >= Scalar(0))) throw ArgumentError("soft_threshold: threshold must be >= 0");
  require_finite(m, "soft_threshold");
  const auto a = m.derived().array();
  return (a.sign() * (a.abs() - t).max(Scalar(0))).matrix();
}

/// Singular value thresholding U max(S - t, 0) V^T, the prox of t * ||.||_*.
template <typename Derived>
Matrix<typename Derived::Scalar> svt(const Eigen::MatrixBase<Derived>& m,
                                     typename Derived::Scalar t) {
  using Scalar = typename Derived::Scalar;
  if (!(t >= Scalar(0))) throw ArgumentError("svt: threshold must be >= 0");
  const auto s = svd(m);
  Index keep = 0;
  while (keep < s.size() && s.singular_values(keep) > t) ++keep;
  if (keep == 0) return Matrix<Scalar>::Zero(m.rows(), m.cols());
  const Vector<Scalar> shrunk = s.singular_values.head(keep).array() - t;
  return s.U.leftCols(keep) * shrunk.asDiagonal() * s.V.leftCols(keep).transpose();
}

/// Elementwise signum with values in {-1, 0, +1}.
template <typename Derived>
Matrix<typename Derived::Scalar> sgn(const Eigen::MatrixBase<Derived>& m) {
  return m.derived().array().sign().matrix();
}

}  // namespace lrme
