#pragma once

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace rabitherm {

using Vector2 = Eigen::Vector2d;
using Matrix2 = Eigen::Matrix2d;
using Vector4 = Eigen::Matrix<double, 4, 1>;
using Matrix4 = Eigen::Matrix<double, 4, 4>;
using Vector5 = Eigen::Matrix<double, 5, 1>;
using Matrix5 = Eigen::Matrix<double, 5, 5>;

/// A quantity that is either finite or divergent (std::nullopt).
///
/// Used for the characteristic time at and beyond the critical point and for
/// estimator variances when the probe carries no temperature information.
using MaybeDivergent = std::optional<double>;

inline double value_or_inf(const MaybeDivergent& x) {
  return x ? *x : std::numeric_limits<double>::infinity();
}

/// Invalid input: violated parameter invariant or precondition.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Covariance violates the uncertainty relation det C >= 1/4.
class UnphysicalState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A QFI formula hit its pure-state singularity with a non-vanishing derivative.
class SingularState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The linear system has no stationary state (drift not Hurwitz, or lambda >= lambda_c).
class NoSteadyState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigensolver or linear solve failed.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Independent evaluation routes disagree beyond their tolerance.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rabitherm
