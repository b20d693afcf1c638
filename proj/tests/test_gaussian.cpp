#include <doctest.h>

#include "oracles.hpp"
#include "rabitherm/gaussian.hpp"

#include <cmath>

using namespace rabitherm;

namespace {

GaussianProbe thermal_probe(double n, double dn) {
  GaussianProbe p;
  p.cov = (n + 0.5) * Matrix2::Identity();
  p.dcov = dn * Matrix2::Identity();
  return p;
}

GaussianProbe random_probe(oracle::Rng& rng, double dmin, double dmax, bool with_mean = true) {
  GaussianProbe p;
  p.cov = rng.covariance(rng.uniform(dmin, dmax));
  p.dcov = rng.symmetric(1.0);
  if (with_mean) p.dmean = Vector2(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  return p;
}

constexpr double kN = 0.58197670686932642;   // 1 / (e - 1)
constexpr double kDn = 0.09206804985616367;  // d n / dT at freq = T = 10

}  // namespace

TEST_CASE("symplectic invariant") {
  auto v = symplectic_invariant(Matrix2::Identity() / 2.0);
  CHECK(v.d == doctest::Approx(0.5));
  CHECK(v.purity == doctest::Approx(1.0));

  v = symplectic_invariant((kN + 0.5) * Matrix2::Identity());
  CHECK(v.d == doctest::Approx(1.081977).epsilon(1e-6));
  CHECK(v.purity == doctest::Approx(0.462117).epsilon(1e-6));

  CHECK_THROWS_AS(symplectic_invariant(Matrix2::Identity() / 4.0), UnphysicalState);
  Matrix2 asym;
  asym << 1.0, 0.2, 0.1, 1.0;
  CHECK_THROWS_AS(symplectic_invariant(asym), DomainError);

  // A rounding dip below the bound is clipped to a pure state.
  v = symplectic_invariant(Matrix2::Identity() * (0.5 - 1e-14));
  CHECK(v.d == 0.5);
  CHECK(v.purity == 1.0);
}

TEST_CASE("symplectic form identity K C K = -d^2 C^-1") {
  const Matrix2 K = symplectic_form();
  CHECK(K(0, 1) == 1.0);
  CHECK(K(1, 0) == -1.0);
  oracle::Rng rng(21);
  for (int i = 0; i < 1000; ++i) {
    const Matrix2 C = rng.covariance(rng.uniform(0.5, 10.0));
    const double d2 = C.determinant();
    CHECK((K * C * K + d2 * C.inverse()).cwiseAbs().maxCoeff() <= 1e-10 * C.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("QFI of parameter-independent state is zero") {
  GaussianProbe p;
  p.cov = 3.0 * Matrix2::Identity();
  for (auto v : {QfiVariant::Purity, QfiVariant::NormalizedCovariance, QfiVariant::SymplecticTrace, QfiVariant::Consensus}) {
    CHECK(qfi_gaussian(p, v) == 0.0);
  }
}

TEST_CASE("thermal QFI oracle") {
  const GaussianProbe p = thermal_probe(kN, kDn);
  const double expected = oracle::thermal_qfi(kN, kDn);
  CHECK(expected == doctest::Approx(9.2067e-3).epsilon(1e-4));
  for (auto v : {QfiVariant::Purity, QfiVariant::NormalizedCovariance, QfiVariant::SymplecticTrace, QfiVariant::Consensus}) {
    CHECK(oracle::rel(qfi_gaussian(p, v), expected) < 1e-12);
  }
  CHECK(oracle::rel(*estimator_precision(p, Estimator::PhotonNumber), kN * (kN + 1.0) / (kDn * kDn)) < 1e-12);
  CHECK(*cramer_rao_bound(expected) == doctest::Approx(108.61).epsilon(1e-4));
}

TEST_CASE("pure probe with moving covariance is singular") {
  GaussianProbe p;
  p.dcov = Matrix2::Identity();
  CHECK_THROWS_AS(qfi_gaussian(p, QfiVariant::Purity), SingularState);
  CHECK_THROWS_AS(qfi_gaussian(p, QfiVariant::Consensus), SingularState);
  // Displacement-only information of a pure probe is finite.
  GaussianProbe shifted;
  shifted.dmean = Vector2(1.0, 0.0);
  CHECK(qfi_gaussian(shifted) == doctest::Approx(2.0));
}

TEST_CASE("QFI variants agree with each other and with the literature form") {
  oracle::Rng rng(22);
  for (int i = 0; i < 10000; ++i) {
    const GaussianProbe p = random_probe(rng, 0.51, 10.0);
    const double f1 = qfi_gaussian(p, QfiVariant::Purity);
    const double f2 = qfi_gaussian(p, QfiVariant::NormalizedCovariance);
    const double f3 = qfi_gaussian(p, QfiVariant::SymplecticTrace);
    CHECK(oracle::rel(f1, f2) <= 1e-8);
    CHECK(oracle::rel(f1, f3) <= 1e-8);
    CHECK(oracle::rel(f1, oracle::gaussian_qfi(p.cov, p.dcov, p.dmean)) <= 1e-8);
    CHECK(f1 >= 0.0);
  }
}

TEST_CASE("QFI is quadratic in the derivatives") {
  oracle::Rng rng(23);
  for (int i = 0; i < 500; ++i) {
    GaussianProbe p = random_probe(rng, 0.6, 5.0);
    const double alpha = rng.uniform(-4.0, 4.0);
    const double f = qfi_gaussian(p);
    p.dcov *= alpha;
    p.dmean *= alpha;
    CHECK(oracle::rel(qfi_gaussian(p), alpha * alpha * f) < 1e-12);
  }
}

TEST_CASE("estimator precision") {
  GaussianProbe flat;
  flat.cov = 2.0 * Matrix2::Identity();
  for (auto e : {Estimator::PhotonNumber, Estimator::Q2, Estimator::P2}) {
    CHECK_FALSE(estimator_precision(flat, e).has_value());
  }

  GaussianProbe p;
  p.cov << 1.3, 0.2, 0.2, 0.9;
  p.dcov << 0.4, -0.1, -0.1, 0.3;
  const double c11 = 1.3, c22 = 0.9, c12 = 0.2;
  CHECK(*estimator_precision(p, Estimator::PhotonNumber) ==
        doctest::Approx((2 * c11 * c11 + 2 * c22 * c22 + 4 * c12 * c12 - 1) / std::pow(0.7, 2)));
  CHECK(*estimator_precision(p, Estimator::Q2) == doctest::Approx(2 * c11 * c11 / (0.4 * 0.4)));
  CHECK(*estimator_precision(p, Estimator::P2) == doctest::Approx(2 * c22 * c22 / (0.3 * 0.3)));

  p.mean = Vector2(0.1, 0.0);
  CHECK_THROWS_AS(estimator_precision(p, Estimator::Q2), DomainError);
}

TEST_CASE("no estimator beats the Cramer-Rao bound") {
  oracle::Rng rng(24);
  for (int i = 0; i < 5000; ++i) {
    const GaussianProbe p = random_probe(rng, 0.51, 10.0, false);
    const double bound = value_or_inf(cramer_rao_bound(qfi_gaussian(p)));
    for (auto e : {Estimator::PhotonNumber, Estimator::Q2, Estimator::P2}) {
      const double v = value_or_inf(estimator_precision(p, e));
      CHECK(v >= bound * (1.0 - 1e-9) - 1e-9);
    }
  }
}

TEST_CASE("Cramer-Rao bound") {
  CHECK_FALSE(cramer_rao_bound(0.0).has_value());
  CHECK(*cramer_rao_bound(1.0, 100) == doctest::Approx(0.01));
  CHECK_THROWS_AS(cramer_rao_bound(1.0, 0), DomainError);
  CHECK_THROWS_AS(cramer_rao_bound(-1.0), DomainError);
}

TEST_CASE("Wick factorization") {
  CHECK(wick_fourth_moment(2, 2, 2, 2, 2, 2, 0, 0, 0, 0) == 12.0);
  CHECK(wick_fourth_moment(1, 0, 0, 0, 0, 1, 0, 0, 0, 0) == 1.0);
  CHECK(wick_fourth_moment(1, 1, 1, 1, 1, 1, 1, 1, 1, 1) == 1.0);
  const double v = 0.7;
  CHECK(wick_fourth_moment(v, v, v, v, v, v, 0, 0, 0, 0) - v * v == doctest::Approx(2 * v * v));
}
