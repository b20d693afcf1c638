#include "rabitherm/model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rabitherm {

namespace {

constexpr double kAtEpTolerance = 1e-12;

void require(bool ok, const char* invariant) {
  if (!ok) throw DomainError(std::string("invalid parameters: ") + invariant);
}

// 1 + 2n, the thermal enhancement of the spin noise.
double thermal_factor(const SystemParams& p) { return 1.0 + 2.0 * p.n(); }

}  // namespace

void SystemParams::validate() const {
  require(std::isfinite(omega0) && omega0 > 0.0, "omega0 > 0");
  require(std::isfinite(Omega) && Omega > 0.0, "Omega > 0");
  require(std::isfinite(kappa) && kappa > 0.0, "kappa > 0");
  require(std::isfinite(Gamma) && Gamma > 0.0, "Gamma > 0");
  require(std::isfinite(lambda) && lambda >= 0.0, "lambda >= 0");
  require(std::isfinite(T) && T > 0.0, "T > 0");
  if (const auto* ib = std::get_if<IndependentBaths>(&scenario)) {
    require(std::isfinite(ib->Tc) && ib->Tc >= 0.0, "Tc >= 0");
  }
}

double SystemParams::cavity_bath_temperature() const {
  if (const auto* ib = std::get_if<IndependentBaths>(&scenario)) return ib->Tc;
  return T;
}

double SystemParams::n() const { return thermal_occupation(Omega, T); }

double SystemParams::n_c() const { return thermal_occupation(omega0, cavity_bath_temperature()); }

double SystemParams::dn_dT() const { return occupation_sensitivity(Omega, T); }

double SystemParams::dnc_dT() const {
  return common_bath() ? occupation_sensitivity(omega0, T) : 0.0;
}

SystemParams SystemParams::with_lambda(double value) const {
  SystemParams out = *this;
  out.lambda = value;
  return out;
}

SystemParams SystemParams::with_temperature(double value) const {
  SystemParams out = *this;
  out.T = value;
  return out;
}

double thermal_occupation(double freq, double temperature) {
  if (!(freq > 0.0)) throw DomainError("thermal_occupation: freq must be positive");
  if (!(temperature >= 0.0)) throw DomainError("thermal_occupation: temperature must be >= 0");
  if (temperature == 0.0) return 0.0;
  return 1.0 / std::expm1(freq / temperature);
}

double occupation_sensitivity(double freq, double temperature) {
  if (!(freq > 0.0)) throw DomainError("occupation_sensitivity: freq must be positive");
  if (!(temperature > 0.0)) throw DomainError("occupation_sensitivity: temperature must be positive");
  const double x = freq / temperature;
  // e^x / (e^x - 1)^2 written so that large x underflows to 0 instead of inf/inf.
  return (x / temperature) / (std::expm1(x) * -std::expm1(-x));
}

double delta_squared(const SystemParams& p) {
  return p.lambda * p.lambda * p.omega0 * p.Omega -
         (p.omega0 * p.omega0 + p.kappa * p.kappa) * (p.Gamma * p.Gamma + p.Omega * p.Omega) *
             thermal_factor(p);
}

SingularCouplings singular_couplings(const SystemParams& p) {
  const double spin = (p.Gamma * p.Gamma + p.Omega * p.Omega) * thermal_factor(p);
  return {std::sqrt((p.omega0 * p.omega0 + p.kappa * p.kappa) * spin / (p.omega0 * p.Omega)),
          std::sqrt(p.omega0 * spin / p.Omega)};
}

std::string_view to_string(Phase phase) {
  return phase == Phase::Normal ? "normal" : "superradiant";
}

std::string_view to_string(AntiPT regime) {
  switch (regime) {
    case AntiPT::SymmetryUnbroken:
      return "unbroken";
    case AntiPT::Broken:
      return "broken";
    case AntiPT::AtEP:
      return "exceptional-point";
  }
  return "?";
}

std::string_view to_string(Branch branch) {
  switch (branch) {
    case Branch::Normal:
      return "normal";
    case Branch::SuperradiantPlus:
      return "superradiant+";
    case Branch::SuperradiantMinus:
      return "superradiant-";
  }
  return "?";
}

PhaseDiagnosis classify_regime(const SystemParams& p) {
  const auto [lambda_c, lambda_ep] = singular_couplings(p);
  PhaseDiagnosis out{lambda_c, lambda_ep, Phase::Normal, AntiPT::SymmetryUnbroken, std::nullopt};
  // At lambda == lambda_c the normal steady state no longer exists.
  out.phase = p.lambda < lambda_c ? Phase::Normal : Phase::Superradiant;
  if (std::abs(p.lambda - lambda_ep) <= kAtEpTolerance * lambda_ep) {
    out.anti_pt = AntiPT::AtEP;
  } else {
    out.anti_pt = p.lambda < lambda_ep ? AntiPT::SymmetryUnbroken : AntiPT::Broken;
  }
  out.tau = characteristic_time(p);
  return out;
}

MaybeDivergent characteristic_time(const SystemParams& p) {
  if (p.lambda >= singular_couplings(p).lambda_c) return std::nullopt;
  const double spin = (p.Gamma * p.Gamma + p.Omega * p.Omega) * thermal_factor(p);
  const double w = p.lambda * p.lambda * p.Omega / spin - p.omega0;
  const double root_sq = p.omega0 * w;
  double rate = p.kappa;
  if (root_sq > 0.0) {
    // kappa - sqrt(omega0 w) rewritten to avoid cancellation next to lambda_c:
    // kappa^2 - omega0 w = -Delta^2 / spin.
    rate = (-delta_squared(p) / spin) / (p.kappa + std::sqrt(root_sq));
  }
  if (!(rate > 0.0)) return std::nullopt;
  return 1.0 / rate;
}

Matrix2 spin_eliminated_drift(const SystemParams& p) {
  const double spring = p.lambda * p.lambda * p.Omega /
                        ((p.Gamma * p.Gamma + p.Omega * p.Omega) * thermal_factor(p));
  Matrix2 m;
  m << -p.kappa, p.omega0, spring - p.omega0, -p.kappa;
  return m;
}

Vector5 FixedPoint::state() const {
  Vector5 s;
  s << q_mean, p_mean, sx, sy, sz;
  return s;
}

Vector5 mean_field_flow(const Vector5& s, const SystemParams& p) {
  const double Q = s[0], P = s[1], x = s[2], y = s[3], z = s[4];
  const double n = p.n();
  Vector5 out;
  out << -p.kappa * Q + p.omega0 * P,                                 //
      -p.kappa * P - p.omega0 * Q - 2.0 * p.lambda * x,               //
      -p.Omega * y - p.Gamma * x,                                     //
      p.Omega * x - p.Gamma * y - p.lambda * Q * z,                   //
      -(4.0 * p.Gamma * n + 2.0 * p.Gamma) * z + p.lambda * Q * y - p.Gamma;
  return out;
}

std::vector<FixedPoint> mean_field_fixed_points(const SystemParams& p) {
  std::vector<FixedPoint> out;
  out.push_back({0.0, 0.0, 0.0, 0.0, -1.0 / (2.0 + 4.0 * p.n()), Branch::Normal});
  if (!(p.lambda > singular_couplings(p).lambda_c)) return out;

  const double cavity = p.omega0 * p.omega0 + p.kappa * p.kappa;
  const double spin = p.Gamma * p.Gamma + p.Omega * p.Omega;
  const double delta = std::sqrt(delta_squared(p));
  const double q_abs = std::sqrt(2.0) * delta / (p.lambda * std::sqrt(cavity));
  const double sz = -cavity * spin / (2.0 * p.lambda * p.lambda * p.omega0 * p.Omega);
  for (const auto& [sign, branch] : {std::pair{1.0, Branch::SuperradiantPlus},
                                    std::pair{-1.0, Branch::SuperradiantMinus}}) {
    FixedPoint fp;
    fp.q_mean = sign * q_abs;
    fp.p_mean = p.kappa * fp.q_mean / p.omega0;
    fp.sx = -cavity * fp.q_mean / (2.0 * p.lambda * p.omega0);
    fp.sy = -p.Gamma * fp.sx / p.Omega;
    fp.sz = sz;
    fp.phase = branch;
    out.push_back(fp);
  }
  return out;
}

LinearSystem linearized_system(const SystemParams& p, const FixedPoint& fp) {
  const Vector5 s = fp.state();
  const double rate_scale =
      std::max({p.kappa, p.omega0, p.Gamma, p.Omega, p.lambda, 1.0});
  const double residual = mean_field_flow(s, p).cwiseAbs().maxCoeff();
  if (residual > 1e-8 * rate_scale * (1.0 + s.cwiseAbs().maxCoeff())) {
    std::ostringstream msg;
    msg << "linearized_system: state is not a fixed point for these parameters (residual "
        << residual << ")";
    throw DomainError(msg.str());
  }

  const double n = p.n();
  const double Q = fp.q_mean, y = fp.sy, z = fp.sz;
  LinearSystem sys;
  sys.drift << -p.kappa, p.omega0, 0, 0, 0,                  //
      -p.omega0, -p.kappa, -2.0 * p.lambda, 0, 0,             //
      0, 0, -p.Gamma, -p.Omega, 0,                            //
      -p.lambda * z, 0, p.Omega, -p.Gamma, -p.lambda * Q,     //
      p.lambda * y, 0, 0, p.lambda * Q, -(2.0 + 4.0 * n) * p.Gamma;

  // Symmetrized white-noise strengths. Cavity: 2 kappa (1 + 2 n_c). Spin: the
  // sigma_z -> <sigma_z> replacement scaled by (1 + 2n), which is Gamma/2 at the
  // normal point and reproduces the Gamma >> kappa closed-form covariance.
  const double cavity_noise = 2.0 * p.kappa * (1.0 + 2.0 * p.n_c());
  const double spin_noise = 2.0 * p.Gamma * (1.0 + 2.0 * n) * (1.0 + 2.0 * n) * z * z;
  sys.diffusion.setZero();
  sys.diffusion.diagonal() << cavity_noise, cavity_noise, spin_noise, spin_noise, 0.0;
  return sys;
}

namespace {

template <int N>
StabilitySpectrum spectrum_of(const Eigen::Matrix<double, N, N>& m) {
  Eigen::EigenSolver<Eigen::Matrix<double, N, N>> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  StabilitySpectrum out;
  double max_re = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < N; ++i) {
    const std::complex<double> ev = solver.eigenvalues()[i];
    out.eigenvalues.push_back(ev);
    out.eigen_real_parts.push_back(ev.real());
    max_re = std::max(max_re, ev.real());
  }
  out.stable = max_re < -kStabilityMargin;
  return out;
}

}  // namespace

StabilitySpectrum stability_spectrum(const LinearSystem& sys) { return spectrum_of<5>(sys.drift); }

StabilitySpectrum transverse_spectrum(const LinearSystem& sys) {
  const Matrix4 block = sys.drift.topLeftCorner<4, 4>();
  return spectrum_of<4>(block);
}

}  // namespace rabitherm
