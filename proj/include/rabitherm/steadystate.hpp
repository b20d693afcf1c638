#pragma once

// Stationary cavity covariance in the normal phase, by three routes:
//   SpinEliminated   - closed form valid for Gamma >> kappa
//   CavityEliminated - slow spin system with the cavity slaved to it, Gamma << kappa
//   Lyapunov         - full linearized (dQ, dP, dsx, dsy) system, valid everywhere
//
// All Langevin dynamics run in (Q, P) = sqrt2 (q, p); covariances leave this
// module in the (q, p) convention (vacuum = I/2).

#include "rabitherm/core.hpp"
#include "rabitherm/model.hpp"

#include <string_view>

namespace rabitherm {

enum class Regime { SpinEliminated, CavityEliminated, Lyapunov };

std::string_view to_string(Regime regime);

/// Unique symmetric C with M C + C M^T + D = 0.
///
/// Throws NoSteadyState if M has an eigenvalue with non-negative real part and
/// NumericalError if the residual cannot be brought below
/// 1e-10 max(max|D|, max|M| max|C|).
Eigen::MatrixXd lyapunov_solve(const Eigen::MatrixXd& drift, const Eigen::MatrixXd& diffusion);

/// Timescale-separation heuristic: SpinEliminated needs Gamma >= 10 kappa,
/// CavityEliminated needs kappa >= 10 Gamma; Lyapunov always applies.
bool regime_applicable(const SystemParams& params, Regime regime);

struct NormalPhaseCovariance {
  Matrix2 cov;
  Regime regime;
  bool within_validity;  ///< false when an asymptotic formula is used outside its regime
};

/// Throws NoSteadyState for lambda >= lambda_c.
NormalPhaseCovariance covariance_normal_phase(const SystemParams& params, Regime regime);

/// Closed-form Gamma >> kappa covariance, entries exactly as published
/// (including the kappa Omega (1 + n_c) terms).
Matrix2 spin_eliminated_covariance(const SystemParams& params);

/// Drift and diffusion of the normal-phase (dQ, dP, dsx, dsy) subsystem.
struct NormalSubsystem {
  Matrix4 drift;
  Matrix4 diffusion;
};
NormalSubsystem normal_phase_subsystem(const SystemParams& params);

struct CavityEliminatedSolution {
  Matrix2 cov;         ///< cavity (q, p) covariance
  Matrix2 spin_drift;  ///< eliminated (dsx, dsy) drift
  Matrix2 spin_cov;    ///< (dsx, dsy) covariance, normalization shared with the other routes
  /// <d^2 sigma_x> scaled by (1 + 2n): the normalization in which the closed
  /// form sx_variance_closed_form() is quoted.
  double sx_variance_scaled;
};

CavityEliminatedSolution cavity_eliminated_solution(const SystemParams& params);

/// Closed-form <d^2 sigma_x> of the Gamma << kappa elimination:
///   (1+2n)/4 - Omega lambda^2 [Omega kappa (1+2n_c) + omega0 Gamma (1+2n)] / (8 Gamma Delta^2).
double sx_variance_closed_form(const SystemParams& params);

/// dC/dT. Analytic chain rule through n(T) (and n_c(T) under CommonBath) for
/// SpinEliminated; central finite difference otherwise.
Matrix2 covariance_sensitivity(const SystemParams& params, Regime regime);

/// Central difference with step 1e-5 T, halved while T +- h leaves the normal
/// phase. Throws NoSteadyState if no admissible step is found.
Matrix2 finite_difference_sensitivity(const SystemParams& params, Regime regime);

}  // namespace rabitherm
