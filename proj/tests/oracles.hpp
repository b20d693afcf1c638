#pragma once

// Reference implementations used only by the tests. Each one takes a route
// that differs from the library's: Smith doubling instead of a Kronecker
// solve, the literature form of the single-mode Gaussian QFI in the
// vacuum-equals-identity convention, finite-difference Jacobians, and
// closed forms for thermal states.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

namespace oracle {

inline double occupation(double freq, double T) { return T == 0.0 ? 0.0 : 1.0 / (std::exp(freq / T) - 1.0); }

inline double occupation_slope(double freq, double T) {
  const double e = std::exp(freq / T);
  return freq / (T * T) * e / ((e - 1.0) * (e - 1.0));
}

/// Solves M C + C M^T + D = 0 by a Cayley transform to a Stein equation and
/// Smith doubling.
inline Eigen::MatrixXd lyapunov(const Eigen::MatrixXd& M, const Eigen::MatrixXd& D) {
  const auto n = M.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const double p = std::max(1.0, M.cwiseAbs().maxCoeff());
  const Eigen::MatrixXd inv = (p * I - M).inverse();
  Eigen::MatrixXd A = (p * I + M) * inv;
  Eigen::MatrixXd C = 2.0 * p * inv * D * inv.transpose();
  for (int k = 0; k < 80; ++k) {
    C += A * C * A.transpose();
    A = A * A;
    if (A.cwiseAbs().maxCoeff() < 1e-300) break;
  }
  return 0.5 * (C + C.transpose());
}

/// QFI of a single-mode Gaussian state written for sigma = 2C (vacuum = I):
///   F = Tr[(s^-1 s')^2] / (2 (1 + P^2)) + 2 P'^2 / (1 - P^4) + 2 mu'^T s^-1 mu'
/// with P = 1 / sqrt(det s).
inline double gaussian_qfi(const Eigen::Matrix2d& C, const Eigen::Matrix2d& dC, const Eigen::Vector2d& dmean) {
  const Eigen::Matrix2d s = 2.0 * C;
  const Eigen::Matrix2d ds = 2.0 * dC;
  const Eigen::Matrix2d si = s.inverse();
  const double det = s.determinant();
  const double P = 1.0 / std::sqrt(det);
  // d det / dtheta = det * Tr[s^-1 s']
  const double ddet = det * (si * ds).trace();
  const double dP = -0.5 * ddet / std::pow(det, 1.5);
  const Eigen::Matrix2d x = si * ds;
  return (x * x).trace() / (2.0 * (1.0 + P * P)) + 2.0 * dP * dP / (1.0 - std::pow(P, 4)) +
         2.0 * dmean.dot(si * dmean);
}

inline double thermal_qfi(double n, double dn) { return dn * dn / (n * (n + 1.0)); }

struct Params {
  double omega0, Omega, kappa, Gamma, lambda, n, n_c;
};

/// Mean-field flow written out independently of the library.
inline Eigen::Matrix<double, 5, 1> flow(const Eigen::Matrix<double, 5, 1>& s, const Params& p) {
  const double Q = s(0), P = s(1), x = s(2), y = s(3), z = s(4);
  Eigen::Matrix<double, 5, 1> out;
  out << -p.kappa * Q + p.omega0 * P, -p.kappa * P - p.omega0 * Q - 2.0 * p.lambda * x,
      -p.Omega * y - p.Gamma * x, p.Omega * x - p.Gamma * y - p.lambda * Q * z,
      -(4.0 * p.Gamma * p.n + 2.0 * p.Gamma) * z + p.lambda * Q * y - p.Gamma;
  return out;
}

inline Eigen::Matrix<double, 5, 5> flow_jacobian(const Eigen::Matrix<double, 5, 1>& s, const Params& p) {
  Eigen::Matrix<double, 5, 5> J;
  for (int j = 0; j < 5; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(s(j)));
    Eigen::Matrix<double, 5, 1> a = s, b = s;
    a(j) += h;
    b(j) -= h;
    J.col(j) = (flow(a, p) - flow(b, p)) / (2.0 * h);
  }
  return J;
}

/// Cavity covariance (q, p) from the spin-adiabatically-eliminated 2x2
/// Langevin system: cavity noise 2 kappa (1 + 2 n_c) on both quadratures and
/// the eliminated spin noise on P.
inline Eigen::Matrix2d spin_eliminated_cov(const Params& p) {
  const double spin = p.Gamma * p.Gamma + p.Omega * p.Omega;
  const double g = p.lambda * p.lambda * p.Omega / (spin * (1.0 + 2.0 * p.n));
  Eigen::Matrix2d M;
  M << -p.kappa, p.omega0, g - p.omega0, -p.kappa;
  const double a = 2.0 * p.kappa * (1.0 + 2.0 * p.n_c);
  const double b = 2.0 * p.Gamma * p.lambda * p.lambda / spin;
  Eigen::Matrix2d D;
  D << a, 0.0, 0.0, a + b;
  return lyapunov(M, D) / 2.0;
}

/// Deterministic generator with a fixed seed per test.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  /// Symmetric covariance with sqrt(det) = d.
  Eigen::Matrix2d covariance(double d) {
    const double squeeze = uniform(-1.5, 1.5);
    const double angle = uniform(0.0, M_PI);
    Eigen::Matrix2d R;
    R << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    const Eigen::Matrix2d S = Eigen::Vector2d(d * std::exp(squeeze), d * std::exp(-squeeze)).asDiagonal();
    return R * S * R.transpose();
  }
  Eigen::Matrix2d symmetric(double scale) {
    Eigen::Matrix2d m;
    m(0, 0) = uniform(-scale, scale);
    m(1, 1) = uniform(-scale, scale);
    m(0, 1) = m(1, 0) = uniform(-scale, scale);
    return m;
  }

 private:
  std::mt19937_64 engine_;
};

inline double rel(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline double max_rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
}

/// Least-squares slope of log|y| against log|x|.
template <class Xs, class Ys>
double loglog_slope(const Xs& xs, const Ys& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double lx = std::log(std::abs(xs[i])), ly = std::log(std::abs(ys[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace oracle
