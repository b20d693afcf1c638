#include "rabitherm/gaussian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace rabitherm {

namespace {

constexpr double kUnphysicalBand = 1e-9;
constexpr double kPureBand = 1e-14;

double mean_term(const GaussianProbe& probe) {
  return probe.dmean.dot(probe.cov.inverse() * probe.dmean);
}

struct Derived {
  double d;
  double purity;
  double dd;   // derivative of d
  Matrix2 x;   // C^-1 C'
};

Derived derive(const GaussianProbe& probe) {
  const auto inv = symplectic_invariant(probe.cov);
  const Matrix2 x = probe.cov.inverse() * probe.dcov;
  // Jacobi: (det C)' = det C * Tr[C^-1 C'], so d' = d Tr[C^-1 C'] / 2.
  return {inv.d, inv.purity, 0.5 * inv.d * x.trace(), x};
}

void reject_pure(double denominator, const char* which) {
  if (denominator <= kPureBand) {
    throw SingularState(std::string("qfi_gaussian(") + which +
                        "): pure probe with parameter-dependent covariance");
  }
}

double qfi_purity(const Derived& g) {
  const double p2 = g.purity * g.purity;
  const double denom = 1.0 - p2 * p2;
  reject_pure(denom, "Purity");
  const double dpurity = -g.dd / (2.0 * g.d * g.d);
  return (g.x * g.x).trace() / (2.0 * (1.0 + p2)) + 2.0 * dpurity * dpurity / denom;
}

double qfi_normalized_covariance(const GaussianProbe& probe, const Derived& g) {
  const double four_d2 = 4.0 * g.d * g.d;
  const double s = four_d2 - 1.0;
  reject_pure(s, "NormalizedCovariance");
  // J = C / (4d^2 - 1)  =>  J' = C'/s - 8 d d' C / s^2
  const Matrix2 dj = probe.dcov / s - (8.0 * g.d * g.dd / (s * s)) * probe.cov;
  const Matrix2 k = symplectic_form();
  return 2.0 * s / (four_d2 + 1.0) * (k * dj * k * probe.dcov).trace();
}

double qfi_symplectic_trace(const GaussianProbe& probe, const Derived& g) {
  const double d4 = std::pow(g.d, 4);
  const double s = 16.0 * d4 - 1.0;
  reject_pure(s, "SymplecticTrace");
  const Matrix2 kc = symplectic_form() * probe.dcov;
  return 8.0 / s * (d4 * (g.x * g.x).trace() - 0.25 * (kc * kc).trace());
}

}  // namespace

Matrix2 symplectic_form() {
  Matrix2 k;
  k << 0.0, 1.0, -1.0, 0.0;
  return k;
}

SymplecticInvariant symplectic_invariant(const Matrix2& cov) {
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if (std::abs(cov(0, 1) - cov(1, 0)) > 1e-12 * scale) {
    throw DomainError("symplectic_invariant: covariance is not symmetric");
  }
  double det = cov.determinant();
  if (!(det >= 0.25 - kUnphysicalBand)) {
    std::ostringstream msg;
    msg << "covariance violates the uncertainty relation: det C = " << det << " < 1/4";
    throw UnphysicalState(msg.str());
  }
  det = std::max(det, 0.25);
  const double d = std::sqrt(det);
  return {d, 1.0 / (2.0 * d)};
}

double qfi_gaussian(const GaussianProbe& probe, QfiVariant variant) {
  const double displacement = mean_term(probe);
  if (probe.dcov.isZero(0.0)) {
    symplectic_invariant(probe.cov);
    return displacement;
  }
  const Derived g = derive(probe);
  switch (variant) {
    case QfiVariant::Purity:
      return qfi_purity(g) + displacement;
    case QfiVariant::NormalizedCovariance:
      return qfi_normalized_covariance(probe, g) + displacement;
    case QfiVariant::SymplecticTrace:
      return qfi_symplectic_trace(probe, g) + displacement;
    case QfiVariant::Consensus:
      break;
  }

  const std::array<double, 3> f{qfi_purity(g), qfi_normalized_covariance(probe, g),
                                qfi_symplectic_trace(probe, g)};
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      const double scale = std::max(std::abs(f[i]), std::abs(f[j]));
      if (std::abs(f[i] - f[j]) > kConsensusTolerance * scale) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "qfi_gaussian: variants disagree (" << f[0] << ", " << f[1] << ", " << f[2]
            << ")";
        throw ConsistencyError(msg.str());
      }
    }
  }
  return (f[0] + f[1] + f[2]) / 3.0 + displacement;
}

double wick_fourth_moment(double c_ab, double c_ad, double c_bc, double c_ac, double c_bd,
                          double c_cd, double mean_a, double mean_b, double mean_c,
                          double mean_d) {
  return c_ab * c_cd + c_ad * c_bc + c_ac * c_bd - 2.0 * mean_a * mean_b * mean_c * mean_d;
}

MaybeDivergent estimator_precision(const GaussianProbe& probe, Estimator estimator) {
  if (probe.mean.cwiseAbs().maxCoeff() > 1e-12) {
    throw DomainError("estimator_precision: probe must have zero first moments");
  }
  const Matrix2& c = probe.cov;
  const Matrix2& dc = probe.dcov;

  // Zero-mean variance of X^2: <X^4> - <X^2>^2 with <X^4> from the Wick factorization.
  const auto square_variance = [](double second) {
    return wick_fourth_moment(second, second, second, second, second, second, 0, 0, 0, 0) -
           second * second;
  };

  double variance = 0.0;
  double slope = 0.0;
  switch (estimator) {
    case Estimator::PhotonNumber:
      // a^dag a = (q^2 + p^2 - 1)/2; both numerator and slope carry the same 1/4.
      variance = 2.0 * c(0, 0) * c(0, 0) + 2.0 * c(1, 1) * c(1, 1) + 4.0 * c(0, 1) * c(0, 1) - 1.0;
      slope = dc(0, 0) + dc(1, 1);
      break;
    case Estimator::Q2:
      variance = square_variance(c(0, 0));
      slope = dc(0, 0);
      break;
    case Estimator::P2:
      variance = square_variance(c(1, 1));
      slope = dc(1, 1);
      break;
  }
  if (slope == 0.0) return std::nullopt;
  return variance / (slope * slope);
}

MaybeDivergent cramer_rao_bound(double fisher, long repetitions) {
  if (repetitions < 1) throw DomainError("cramer_rao_bound: repetition count must be >= 1");
  if (!(fisher >= 0.0)) throw DomainError("cramer_rao_bound: Fisher information must be >= 0");
  if (fisher == 0.0) return std::nullopt;
  return 1.0 / (static_cast<double>(repetitions) * fisher);
}

}  // namespace rabitherm
