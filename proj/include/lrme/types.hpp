#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace lrme {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

// Shapes of two operands disagree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A parameter is outside its admissible range.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite values, failed factorizations, diverging iterations.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative method hit its cap before meeting its tolerance.
class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* where) {
  if (!m.allFinite()) {
    throw ArgumentError(std::string(where) + ": matrix contains NaN or Inf");
  }
}

template <typename A, typename B>
void require_same_shape(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                        const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(where) + ": shape " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " does not match " +
                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

}  // namespace lrme
