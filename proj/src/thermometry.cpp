#include "rabitherm/thermometry.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace rabitherm {

Regime select_regime(const SystemParams& p) {
  if (p.Gamma >= 10.0 * p.kappa) return Regime::SpinEliminated;
  if (p.kappa >= 10.0 * p.Gamma) return Regime::CavityEliminated;
  return Regime::Lyapunov;
}

std::string_view to_string(PrecisionEstimator estimator) {
  switch (estimator) {
    case PrecisionEstimator::QFI:
      return "qfi";
    case PrecisionEstimator::PhotonNumber:
      return "photon";
    case PrecisionEstimator::Q2:
      return "q2";
    case PrecisionEstimator::P2:
      return "p2";
  }
  return "?";
}

GaussianProbe probe(const SystemParams& params, Regime regime) {
  GaussianProbe out;
  out.cov = covariance_normal_phase(params, regime).cov;
  out.dcov = covariance_sensitivity(params, regime);
  return out;
}

MaybeDivergent temperature_precision(const SystemParams& params, Regime regime,
                                     PrecisionEstimator estimator, long repetitions) {
  if (repetitions < 1) throw DomainError("temperature_precision: repetition count must be >= 1");
  const GaussianProbe pr = probe(params, regime);
  const auto per_shot = [&](Estimator e) -> MaybeDivergent {
    const MaybeDivergent v = estimator_precision(pr, e);
    if (!v) return std::nullopt;
    return *v / static_cast<double>(repetitions);
  };
  switch (estimator) {
    case PrecisionEstimator::QFI:
      return cramer_rao_bound(qfi_gaussian(pr, QfiVariant::Consensus), repetitions);
    case PrecisionEstimator::PhotonNumber:
      return per_shot(Estimator::PhotonNumber);
    case PrecisionEstimator::Q2:
      return per_shot(Estimator::Q2);
    case PrecisionEstimator::P2:
      return per_shot(Estimator::P2);
  }
  return std::nullopt;
}

CpAsymptote qfi_cp_asymptote(const SystemParams& p) {
  p.validate();
  const double n = p.n();
  const double cavity = p.kappa * p.kappa + p.omega0 * p.omega0;
  const double spin = p.Gamma * p.Gamma + p.Omega * p.Omega;
  const double t4 = std::pow(p.T, 4);
  const double common = p.Omega * p.Omega * n * n * (1.0 + n) * (1.0 + n) * cavity * cavity;
  const double d2 = delta_squared(p);

  CpAsymptote out;
  out.f_coeff = common / (4.0 * t4 * std::pow(1.0 + 2.0 * n, 2) * p.kappa * p.kappa);
  out.f_lead = common * spin * spin / (d2 * d2 * t4);
  const double tau = value_or_inf(characteristic_time(p));
  out.f_lead_with_tau_squared = tau * tau * out.f_lead;
  return out;
}

namespace {

SweepRow evaluate_row(const SystemParams& base, double lambda, Regime regime, long repetitions) {
  SweepRow row;
  row.lambda = lambda;
  const SystemParams p = base.with_lambda(lambda);
  try {
    p.validate();
    const PhaseDiagnosis diag = classify_regime(p);
    row.lambda_over_lambda_c = lambda / diag.lambda_c;
    row.tau = diag.tau;
    row.phase = diag.phase;
    row.anti_pt = diag.anti_pt;
    if (diag.phase != Phase::Normal) {
      row.error = "lambda >= lambda_c: no normal-phase steady state";
      return row;
    }
    const GaussianProbe pr = probe(p, regime);
    const double per_shot = static_cast<double>(repetitions);
    const auto scaled = [&](Estimator e) -> MaybeDivergent {
      const MaybeDivergent v = estimator_precision(pr, e);
      if (!v) return std::nullopt;
      return *v / per_shot;
    };
    row.qfi = qfi_gaussian(pr, QfiVariant::Consensus);
    row.var_qfi = cramer_rao_bound(row.qfi, repetitions);
    row.var_photon = scaled(Estimator::PhotonNumber);
    row.var_q2 = scaled(Estimator::Q2);
    row.var_p2 = scaled(Estimator::P2);
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep(const SystemParams& base, const std::vector<double>& lambda_grid,
                            Regime regime, long repetitions) {
  if (lambda_grid.empty()) throw DomainError("sweep: lambda grid is empty");
  if (repetitions < 1) throw DomainError("sweep: repetition count must be >= 1");
  base.with_lambda(0.0).validate();

  std::vector<SweepRow> rows(lambda_grid.size());
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1,
                                                      lambda_grid.size());
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < lambda_grid.size(); i += workers) {
          rows[i] = evaluate_row(base, lambda_grid[i], regime, repetitions);
        }
      });
    }
  }
  return rows;
}

std::vector<double> critical_grid(double lo, double hi, int steps) {
  if (steps < 1) throw DomainError("critical_grid: steps must be >= 1");
  if (!(lo >= 0.0 && lo <= hi && hi < 1.0)) {
    throw DomainError("critical_grid: need 0 <= lo <= hi < 1");
  }
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps));
  if (steps == 1) {
    grid.push_back(lo);
    return grid;
  }
  const double far = 1.0 - lo;
  const double near = 1.0 - hi;
  for (int i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) / (steps - 1);
    grid.push_back(1.0 - far * std::pow(near / far, t));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

}  // namespace rabitherm
