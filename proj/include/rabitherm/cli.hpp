#pragma once

// Front end for `rabitherm diagnose` and `rabitherm sweep`.
//
// Configuration is a flat `key = value` file (`#` starts a comment). Every key
// has a command-line flag of the same name (`--key value`); flags win over the
// file, and the fully resolved configuration is echoed into JSON output.

#include "rabitherm/thermometry.hpp"

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rabitherm {

inline constexpr const char* kVersion = "0.1.0";

/// Unreadable config file or unwritable output.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Json };
enum class RegimeChoice { Auto, Spin, Cavity, Lyapunov };

struct RunConfig {
  /// Defaults: omega0 = 1, Omega = 10, kappa = 1, Gamma = 10, T = 10, Tc = 0.
  SystemParams params{.omega0 = 1.0, .Omega = 10.0, .lambda = 0.0, .kappa = 1.0, .Gamma = 10.0,
                      .T = 10.0, .scenario = IndependentBaths{}};
  double lambda_min = 0.05;
  double lambda_max = 0.9999;
  int steps = 200;
  bool relative_grid = true;
  RegimeChoice regime = RegimeChoice::Auto;
  std::vector<PrecisionEstimator> estimators{PrecisionEstimator::QFI, PrecisionEstimator::PhotonNumber,
                                             PrecisionEstimator::Q2, PrecisionEstimator::P2};
  long repetitions = 1;
  std::string output = "-";
  OutputFormat format = OutputFormat::Csv;
};

using KeyValues = std::map<std::string, std::string>;

/// Recognized keys, in canonical order.
const std::vector<std::string>& config_keys();

/// Throws DomainError on malformed lines or unknown keys.
KeyValues parse_key_values(std::istream& in, const std::string& source = "<config>");
KeyValues load_config_file(const std::string& path);

/// Defaults overlaid with `values`. Throws DomainError naming the offending key
/// or violated parameter invariant.
RunConfig resolve_config(const KeyValues& values);

/// Canonical string form of every key; resolve_config(to_key_values(c)) == c.
KeyValues to_key_values(const RunConfig& config);

Regime resolve_regime(const RunConfig& config);

/// Absolute lambda values. Relative grids are fractions of lambda_c, crowded
/// towards the critical point when lambda_max < 1 and linear otherwise;
/// absolute grids are linear.
std::vector<double> lambda_grid(const RunConfig& config);

/// Columns: lambda, lambda_over_lambda_c, tau, phase, qfi, var_qfi,
/// var_photon, var_q2, var_p2, error. Divergent values print as `inf`;
/// unselected estimators and failed rows print `nan`.
std::string render_csv(const std::vector<SweepRow>& rows, const RunConfig& config);
std::string render_json(const std::vector<SweepRow>& rows, const RunConfig& config);

std::string diagnose_report(const RunConfig& config);

/// Exit codes: 0 success, 1 numerical failure, 2 invalid input, 3 I/O failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rabitherm
