#pragma once

// Temperature estimation with the stationary cavity field as the probe.

#include "rabitherm/gaussian.hpp"
#include "rabitherm/model.hpp"
#include "rabitherm/steadystate.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rabitherm {

/// SpinEliminated if Gamma >= 10 kappa, CavityEliminated if kappa >= 10 Gamma,
/// otherwise Lyapunov.
Regime select_regime(const SystemParams& params);

/// Zero-mean probe with dC/dT honouring the bath scenario.
GaussianProbe probe(const SystemParams& params, Regime regime);

enum class PrecisionEstimator { QFI, PhotonNumber, Q2, P2 };

std::string_view to_string(PrecisionEstimator estimator);

MaybeDivergent temperature_precision(const SystemParams& params, Regime regime,
                                     PrecisionEstimator estimator, long repetitions = 1);

struct CpAsymptote {
  /// Leading near-CP QFI, proportional to Delta^-4.
  double f_lead;
  /// lambda-independent coefficient of tau^2 in the near-CP QFI.
  double f_coeff;
  /// Published leading term including its extra tau^2 factor; scales as
  /// Delta^-8 and is kept for comparison only. Infinite when tau diverges.
  double f_lead_with_tau_squared;
};

CpAsymptote qfi_cp_asymptote(const SystemParams& params);

struct SweepRow {
  double lambda = 0.0;
  double lambda_over_lambda_c = 0.0;
  MaybeDivergent tau;
  Phase phase = Phase::Normal;
  AntiPT anti_pt = AntiPT::SymmetryUnbroken;
  double qfi = 0.0;
  MaybeDivergent var_qfi;
  MaybeDivergent var_photon;
  MaybeDivergent var_q2;
  MaybeDivergent var_p2;
  /// Set when the point could not be evaluated (e.g. lambda >= lambda_c);
  /// the numeric fields are then meaningless.
  std::optional<std::string> error;
};

/// One row per grid value in input order. Rows are evaluated concurrently;
/// failures are reported per row. Throws DomainError on an empty grid.
std::vector<SweepRow> sweep(const SystemParams& base, const std::vector<double>& lambda_grid,
                            Regime regime, long repetitions = 1);

/// `steps` values of lambda / lambda_c between lo and hi, spaced
/// logarithmically in the distance 1 - lambda/lambda_c so that points crowd
/// towards the critical point.
std::vector<double> critical_grid(double lo, double hi, int steps);

}  // namespace rabitherm
