#pragma once

// Single-mode Gaussian metrology in the (q, p) convention: q = (a + a^dag)/sqrt2,
// p = (a - a^dag)/(i sqrt2), vacuum covariance I/2.

#include "rabitherm/core.hpp"

namespace rabitherm {

/// First and second moments of a single-mode Gaussian state together with
/// their derivatives with respect to the estimated parameter.
struct GaussianProbe {
  Vector2 mean = Vector2::Zero();
  Matrix2 cov = Matrix2::Identity() / 2.0;
  Vector2 dmean = Vector2::Zero();
  Matrix2 dcov = Matrix2::Zero();
};

/// K = [[0, 1], [-1, 0]].
Matrix2 symplectic_form();

struct SymplecticInvariant {
  double d;       ///< sqrt(det C)
  double purity;  ///< 1 / (2d)
};

/// Throws UnphysicalState when det C < 1/4 - 1e-9; rounding dips within
/// 1e-12 of the bound are clipped to a pure state.
SymplecticInvariant symplectic_invariant(const Matrix2& cov);

enum class QfiVariant {
  Purity,                ///< fidelity-based form with the purity derivative term
  NormalizedCovariance,  ///< symplectic trace of J' with J = C / (4d^2 - 1)
  SymplecticTrace,       ///< d^4 Tr[(C^-1 C')^2] - Tr[(K C')^2]/4 form
  Consensus,             ///< all three, cross-checked, averaged
};

inline constexpr double kConsensusTolerance = 1e-8;

/// Quantum Fisher information of the probe. Every variant includes the
/// first-moment term dmean^T C^-1 dmean.
///
/// Throws SingularState for a pure probe with non-zero dcov (the variants
/// divide by 1 - P^4, 4d^2 - 1 or 16d^4 - 1), and ConsistencyError when
/// Consensus finds two variants apart by more than kConsensusTolerance.
double qfi_gaussian(const GaussianProbe& probe, QfiVariant variant = QfiVariant::Consensus);

enum class Estimator { PhotonNumber, Q2, P2 };

/// Error-propagation variance of a zero-mean probe measured with a^dag a,
/// q^2 or p^2. Divergent when the observable's mean does not depend on the
/// parameter.
MaybeDivergent estimator_precision(const GaussianProbe& probe, Estimator estimator);

/// 1 / (N F); divergent when F = 0.
MaybeDivergent cramer_rao_bound(double fisher, long repetitions = 1);

/// Gaussian moment factorization
///   <ABCD> = <AB><CD> + <AD><BC> + <AC><BD> - 2<A><B><C><D>.
double wick_fourth_moment(double c_ab, double c_ad, double c_bc, double c_ac, double c_bd,
                          double c_cd, double mean_a, double mean_b, double mean_c,
                          double mean_d);

}  // namespace rabitherm
