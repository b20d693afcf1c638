#pragma once

// Dissipative quantum Rabi model: parameters, thermal occupations, the
// normal/superradiant phase boundary, the anti-PT exceptional point of the
// spin-eliminated cavity generator, mean-field fixed points and the linearized
// fluctuation system around them.
//
// Units: hbar = k_B = 1. Quadratures Q = a + a^dag, P = i(a^dag - a); spin
// operators are half Pauli matrices.

#include "rabitherm/core.hpp"

#include <array>
#include <complex>
#include <string_view>
#include <variant>
#include <vector>

namespace rabitherm {

/// Cavity bath held at its own temperature, independent of the probed one.
struct IndependentBaths {
  double Tc = 0.0;
};

/// Cavity and spin share the probed bath: T_c tracks T everywhere, including
/// in every temperature derivative.
struct CommonBath {};

using BathScenario = std::variant<IndependentBaths, CommonBath>;

struct SystemParams {
  double omega0 = 1.0;  ///< cavity frequency
  double Omega = 1.0;   ///< spin frequency
  double lambda = 0.0;  ///< spin-cavity coupling
  double kappa = 1.0;   ///< cavity decay rate
  double Gamma = 1.0;   ///< spin decay rate
  double T = 1.0;       ///< temperature of the probed (spin) bath
  BathScenario scenario = IndependentBaths{};

  /// Throws DomainError naming the first violated invariant.
  void validate() const;

  bool common_bath() const { return std::holds_alternative<CommonBath>(scenario); }
  double cavity_bath_temperature() const;

  /// Spin-bath occupation n at frequency Omega.
  double n() const;
  /// Cavity-bath occupation n_c at frequency omega0.
  double n_c() const;
  double dn_dT() const;
  /// Zero for independent baths.
  double dnc_dT() const;

  SystemParams with_lambda(double value) const;
  SystemParams with_temperature(double value) const;
};

double thermal_occupation(double freq, double temperature);
double occupation_sensitivity(double freq, double temperature);

/// Delta^2 = lambda^2 omega0 Omega - (omega0^2 + kappa^2)(Gamma^2 + Omega^2)(1 + 2n).
/// Negative in the normal phase.
double delta_squared(const SystemParams& params);

struct SingularCouplings {
  double lambda_c;   ///< critical point
  double lambda_ep;  ///< exceptional point
};

/// lambda is ignored.
SingularCouplings singular_couplings(const SystemParams& params);

enum class Phase { Normal, Superradiant };
enum class AntiPT { SymmetryUnbroken, Broken, AtEP };

std::string_view to_string(Phase phase);
std::string_view to_string(AntiPT regime);

struct PhaseDiagnosis {
  double lambda_c;
  double lambda_ep;
  Phase phase;
  AntiPT anti_pt;
  MaybeDivergent tau;
};

PhaseDiagnosis classify_regime(const SystemParams& params);

/// Inverse slowest relaxation rate of the spin-eliminated cavity; divergent
/// for lambda >= lambda_c.
MaybeDivergent characteristic_time(const SystemParams& params);

/// Spin-eliminated cavity drift
///   [[-kappa, omega0], [lambda^2 Omega / ((Gamma^2+Omega^2)(1+2n)) - omega0, -kappa]].
Matrix2 spin_eliminated_drift(const SystemParams& params);

enum class Branch { Normal, SuperradiantPlus, SuperradiantMinus };

std::string_view to_string(Branch branch);

struct FixedPoint {
  double q_mean = 0.0;
  double p_mean = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  double sz = 0.0;
  Branch phase = Branch::Normal;

  /// (Q, P, sigma_x, sigma_y, sigma_z)
  Vector5 state() const;
};

/// Mean-field right-hand side of the noise-free Langevin equations.
Vector5 mean_field_flow(const Vector5& state, const SystemParams& params);

/// Normal point always; both superradiant branches iff lambda > lambda_c.
/// SuperradiantPlus carries <Q> > 0.
std::vector<FixedPoint> mean_field_fixed_points(const SystemParams& params);

/// Linearized fluctuations h = (dQ, dP, dsx, dsy, dsz):  dh/dt = drift h + noise,
/// with <noise(t) noise(t')^T>_sym = diffusion delta(t - t').
struct LinearSystem {
  Matrix5 drift;
  Matrix5 diffusion;
};

/// Throws DomainError if fp is not a fixed point of the flow for params.
LinearSystem linearized_system(const SystemParams& params, const FixedPoint& fp);

struct StabilitySpectrum {
  std::vector<std::complex<double>> eigenvalues;
  std::vector<double> eigen_real_parts;
  bool stable = false;
};

inline constexpr double kStabilityMargin = 1e-10;

/// Eigenvalues of the full drift; stable iff max Re < -kStabilityMargin.
StabilitySpectrum stability_spectrum(const LinearSystem& sys);

/// Same analysis restricted to the (dQ, dP, dsx, dsy) block, i.e. with the
/// inversion fluctuation dsz held at zero.
StabilitySpectrum transverse_spectrum(const LinearSystem& sys);

}  // namespace rabitherm
