#include "rabitherm/steadystate.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rabitherm {

namespace {

constexpr double kResidualTolerance = 1e-10;
constexpr double kRelativeStep = 1e-5;
constexpr int kMaxStepHalvings = 40;

void require_normal_phase(const SystemParams& p) {
  const double lambda_c = singular_couplings(p).lambda_c;
  if (!(p.lambda < lambda_c)) {
    std::ostringstream msg;
    msg << "no normal-phase steady state: lambda = " << p.lambda << " >= lambda_c = " << lambda_c;
    throw NoSteadyState(msg.str());
  }
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::SpinEliminated:
      return "spin";
    case Regime::CavityEliminated:
      return "cavity";
    case Regime::Lyapunov:
      return "lyapunov";
  }
  return "?";
}

Eigen::MatrixXd lyapunov_solve(const Eigen::MatrixXd& drift, const Eigen::MatrixXd& diffusion) {
  const Eigen::Index n = drift.rows();
  if (drift.cols() != n || diffusion.rows() != n || diffusion.cols() != n) {
    throw DomainError("lyapunov_solve: drift and diffusion must be square and of equal size");
  }
  if (max_abs(diffusion - diffusion.transpose()) > 1e-12 * std::max(1.0, max_abs(diffusion))) {
    throw DomainError("lyapunov_solve: diffusion must be symmetric");
  }
  Eigen::EigenSolver<Eigen::MatrixXd> eig(drift, false);
  if (eig.info() != Eigen::Success) throw NumericalError("lyapunov_solve: eigensolver failed");
  if (eig.eigenvalues().real().maxCoeff() >= 0.0) {
    throw NoSteadyState("lyapunov_solve: drift has an eigenvalue with non-negative real part");
  }

  // vec(M C + C M^T) = (I (x) M + M (x) I) vec(C), column-major vec.
  const Eigen::Index n2 = n * n;
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(n2, n2);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index row = j * n + i;  // C(i, j)
      for (Eigen::Index k = 0; k < n; ++k) {
        op(row, j * n + k) += drift(i, k);  // (M C)(i, j)
        op(row, k * n + i) += drift(j, k);  // (C M^T)(i, j)
      }
    }
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(op);
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(diffusion.data(), n2);
  Eigen::VectorXd x = lu.solve(rhs);

  // Relative to |D|, or to |M||C| once C is so large (near the critical
  // point) that rounding C itself leaves a residual of order eps |M||C|.
  Eigen::MatrixXd cov(n, n);
  for (int refine = 0;; ++refine) {
    cov = Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n);
    cov = 0.5 * (cov + cov.transpose()).eval();
    const double bound = kResidualTolerance * std::max(max_abs(diffusion), max_abs(drift) * max_abs(cov));
    const Eigen::MatrixXd residual = drift * cov + cov * drift.transpose() + diffusion;
    if (max_abs(residual) <= bound) break;
    if (refine == 3 || !cov.allFinite()) {
      std::ostringstream msg;
      msg << "lyapunov_solve: residual " << max_abs(residual) << " exceeds " << bound;
      throw NumericalError(msg.str());
    }
    x += lu.solve(-Eigen::Map<const Eigen::VectorXd>(residual.data(), n2));
  }
  return cov;
}

bool regime_applicable(const SystemParams& p, Regime regime) {
  switch (regime) {
    case Regime::SpinEliminated:
      return p.Gamma >= 10.0 * p.kappa;
    case Regime::CavityEliminated:
      return p.kappa >= 10.0 * p.Gamma;
    case Regime::Lyapunov:
      return true;
  }
  return false;
}

Matrix2 spin_eliminated_covariance(const SystemParams& p) {
  const double n = p.n();
  const double nc = p.n_c();
  const double a = 1.0 + 2.0 * n;
  const double l2 = p.lambda * p.lambda;
  const double spin = p.Omega * p.Omega + p.Gamma * p.Gamma;
  const double d2 = delta_squared(p);
  const double sum = p.omega0 * p.Gamma * a + p.kappa * p.Omega * (1.0 + nc);
  const double diff = p.omega0 * p.Gamma * a - p.kappa * p.Omega * (1.0 + nc);

  const double c11 = 0.5 * (1.0 + 2.0 * nc) - p.omega0 * l2 * sum / (4.0 * p.kappa * d2);
  const double c22 = 0.5 * (1.0 + 2.0 * nc) + l2 * diff / (4.0 * p.kappa * p.omega0 * spin * a) -
                     p.kappa * l2 * sum / (4.0 * p.omega0 * d2);
  const double c12 = -l2 * sum / (4.0 * d2);
  Matrix2 c;
  c << c11, c12, c12, c22;
  return c;
}

namespace {

// Partial derivatives of spin_eliminated_covariance with respect to n and n_c.
std::pair<Matrix2, Matrix2> spin_eliminated_partials(const SystemParams& p) {
  const double n = p.n();
  const double nc = p.n_c();
  const double a = 1.0 + 2.0 * n;
  const double l2 = p.lambda * p.lambda;
  const double cavity = p.omega0 * p.omega0 + p.kappa * p.kappa;
  const double spin = p.Omega * p.Omega + p.Gamma * p.Gamma;
  const double d2 = delta_squared(p);
  const double sum = p.omega0 * p.Gamma * a + p.kappa * p.Omega * (1.0 + nc);

  // d/dn (sum / Delta^2)
  const double dsum_dn = 2.0 * p.omega0 * p.Gamma;
  const double dd2_dn = -2.0 * cavity * spin;
  const double q_n = (dsum_dn * d2 - sum * dd2_dn) / (d2 * d2);
  // d/dn (diff / a) = 2 kappa Omega (1 + n_c) / a^2
  const double ratio_n = 2.0 * p.kappa * p.Omega * (1.0 + nc) / (a * a);

  Matrix2 by_n;
  by_n(0, 0) = -p.omega0 * l2 / (4.0 * p.kappa) * q_n;
  by_n(0, 1) = by_n(1, 0) = -l2 / 4.0 * q_n;
  by_n(1, 1) = l2 / (4.0 * p.kappa * p.omega0 * spin) * ratio_n - p.kappa * l2 / (4.0 * p.omega0) * q_n;

  // n_c enters through 1 + 2n_c and sum (d sum / d n_c = kappa Omega); Delta^2 is independent.
  const double ko = p.kappa * p.Omega;
  Matrix2 by_nc;
  by_nc(0, 0) = 1.0 - p.omega0 * l2 * ko / (4.0 * p.kappa * d2);
  by_nc(0, 1) = by_nc(1, 0) = -l2 * ko / (4.0 * d2);
  by_nc(1, 1) = 1.0 - l2 * ko / (4.0 * p.kappa * p.omega0 * spin * a) -
                p.kappa * l2 * ko / (4.0 * p.omega0 * d2);
  return {by_n, by_nc};
}

}  // namespace

NormalSubsystem normal_phase_subsystem(const SystemParams& p) {
  const LinearSystem full = linearized_system(p, mean_field_fixed_points(p).front());
  return {full.drift.topLeftCorner<4, 4>(), full.diffusion.topLeftCorner<4, 4>()};
}

CavityEliminatedSolution cavity_eliminated_solution(const SystemParams& p) {
  require_normal_phase(p);
  const double n = p.n();
  const double a = 1.0 + 2.0 * n;
  const double cavity = p.omega0 * p.omega0 + p.kappa * p.kappa;
  const NormalSubsystem sub = normal_phase_subsystem(p);
  const double cavity_noise = sub.diffusion(0, 0);
  const double spin_noise = sub.diffusion(2, 2);

  CavityEliminatedSolution out;
  out.spin_drift << -p.Gamma, -p.Omega,
      p.Omega - p.lambda * p.lambda * p.omega0 / (cavity * a), -p.Gamma;

  // State (dsx, dsy, xiQ, xiP): xi is the free cavity response to its bath,
  // the spin sees the cavity noise through the white adiabatic force
  //   F = lambda (kappa A+ + omega0 A-) / (2 (kappa^2 + omega0^2)(1 + 2n)).
  // Noise sources w = (A+, A-, spin+, spin-) are mutually uncorrelated.
  Matrix4 drift = Matrix4::Zero();
  drift.topLeftCorner<2, 2>() = out.spin_drift;
  drift.bottomRightCorner<2, 2>() << -p.kappa, p.omega0, -p.omega0, -p.kappa;

  const double force = p.lambda / (2.0 * a * cavity);
  Matrix4 mix;
  mix << 0, 0, 1, 0,                                      //
      force * p.kappa, force * p.omega0, 0, 1,            //
      1, 0, 0, 0,                                         //
      0, 1, 0, 0;
  const Vector4 strengths(cavity_noise, cavity_noise, spin_noise, spin_noise);
  const Matrix4 diffusion = mix * strengths.asDiagonal() * mix.transpose();
  const Matrix4 y = lyapunov_solve(drift, diffusion);

  // Slaved cavity: dQ = -2 lambda omega0 / (omega0^2 + kappa^2) dsx + xiQ, likewise dP with kappa.
  Eigen::Matrix<double, 2, 4> readout;
  readout << -2.0 * p.lambda * p.omega0 / cavity, 0, 1, 0,  //
      -2.0 * p.lambda * p.kappa / cavity, 0, 0, 1;
  out.cov = readout * y * readout.transpose() / 2.0;
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  out.spin_cov = y.topLeftCorner<2, 2>();
  out.sx_variance_scaled = a * y(0, 0);
  return out;
}

double sx_variance_closed_form(const SystemParams& p) {
  const double a = 1.0 + 2.0 * p.n();
  const double l2 = p.lambda * p.lambda;
  return 0.25 * a - p.Omega * l2 *
                        (p.Omega * p.kappa * (1.0 + 2.0 * p.n_c()) + p.omega0 * p.Gamma * a) /
                        (8.0 * p.Gamma * delta_squared(p));
}

NormalPhaseCovariance covariance_normal_phase(const SystemParams& p, Regime regime) {
  p.validate();
  require_normal_phase(p);
  NormalPhaseCovariance out{Matrix2::Zero(), regime, regime_applicable(p, regime)};
  switch (regime) {
    case Regime::SpinEliminated:
      out.cov = spin_eliminated_covariance(p);
      break;
    case Regime::CavityEliminated:
      out.cov = cavity_eliminated_solution(p).cov;
      break;
    case Regime::Lyapunov: {
      const NormalSubsystem sub = normal_phase_subsystem(p);
      const Eigen::MatrixXd c = lyapunov_solve(sub.drift, sub.diffusion);
      out.cov = c.topLeftCorner(2, 2) / 2.0;
      break;
    }
  }
  return out;
}

Matrix2 finite_difference_sensitivity(const SystemParams& p, Regime regime) {
  double h = kRelativeStep * p.T;
  for (int attempt = 0; attempt <= kMaxStepHalvings; ++attempt, h *= 0.5) {
    const SystemParams up = p.with_temperature(p.T + h);
    const SystemParams down = p.with_temperature(p.T - h);
    if (!(down.T > 0.0)) continue;
    if (!(up.lambda < singular_couplings(up).lambda_c) ||
        !(down.lambda < singular_couplings(down).lambda_c)) {
      continue;
    }
    return (covariance_normal_phase(up, regime).cov - covariance_normal_phase(down, regime).cov) /
           (2.0 * h);
  }
  throw NoSteadyState("covariance_sensitivity: no finite-difference step keeps T +- h in the normal phase");
}

Matrix2 covariance_sensitivity(const SystemParams& p, Regime regime) {
  p.validate();
  require_normal_phase(p);
  if (regime != Regime::SpinEliminated) return finite_difference_sensitivity(p, regime);
  const auto [by_n, by_nc] = spin_eliminated_partials(p);
  return by_n * p.dn_dT() + by_nc * p.dnc_dT();
}

}  // namespace rabitherm
