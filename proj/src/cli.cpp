#include "rabitherm/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <sstream>

namespace rabitherm {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw DomainError("invalid value '" + value + "' for key '" + key + "': expected " + expected);
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc{} || res.ptr != end) bad_value(key, value, "a number");
  return out;
}

long parse_long(const std::string& key, const std::string& value) {
  long out = 0;
  const char* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc{} || res.ptr != end) bad_value(key, value, "an integer");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "true or false");
}

RegimeChoice parse_regime(const std::string& value) {
  if (value == "auto") return RegimeChoice::Auto;
  if (value == "spin") return RegimeChoice::Spin;
  if (value == "cavity") return RegimeChoice::Cavity;
  if (value == "lyapunov") return RegimeChoice::Lyapunov;
  bad_value("regime", value, "auto, spin, cavity or lyapunov");
}

std::string_view regime_choice_name(RegimeChoice r) {
  switch (r) {
    case RegimeChoice::Auto:
      return "auto";
    case RegimeChoice::Spin:
      return "spin";
    case RegimeChoice::Cavity:
      return "cavity";
    case RegimeChoice::Lyapunov:
      return "lyapunov";
  }
  return "?";
}

std::vector<PrecisionEstimator> parse_estimators(const std::string& value) {
  std::vector<PrecisionEstimator> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    PrecisionEstimator e;
    if (item == "qfi") {
      e = PrecisionEstimator::QFI;
    } else if (item == "photon") {
      e = PrecisionEstimator::PhotonNumber;
    } else if (item == "q2") {
      e = PrecisionEstimator::Q2;
    } else if (item == "p2") {
      e = PrecisionEstimator::P2;
    } else {
      bad_value("estimators", value, "a comma list of qfi, photon, q2, p2");
    }
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
  }
  if (out.empty()) bad_value("estimators", value, "at least one estimator");
  return out;
}

bool selected(const RunConfig& c, PrecisionEstimator e) {
  return std::find(c.estimators.begin(), c.estimators.end(), e) != c.estimators.end();
}

std::string cell(const MaybeDivergent& v, bool enabled, bool failed) {
  if (!enabled || failed) return "nan";
  return format_number(value_or_inf(v));
}

std::string sanitize(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char ch) { return ch == ',' || ch == '\n' || ch == '\r'; }, ';');
  return s;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "omega0", "Omega",      "kappa",         "Gamma",  "T",          "Tc",
      "common-bath", "lambda", "lambda-min", "lambda-max", "steps", "relative-grid",
      "regime", "estimators", "N",             "output", "format"};
  return keys;
}

KeyValues parse_key_values(std::istream& in, const std::string& source) {
  KeyValues out;
  const auto& keys = config_keys();
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DomainError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw DomainError(source + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    out[key] = value;
  }
  return out;
}

KeyValues load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  return parse_key_values(in, path);
}

RunConfig resolve_config(const KeyValues& values) {
  RunConfig c;
  IndependentBaths baths = std::get<IndependentBaths>(c.params.scenario);
  bool common = false;
  for (const auto& [key, value] : values) {
    if (key == "omega0") {
      c.params.omega0 = parse_double(key, value);
    } else if (key == "Omega") {
      c.params.Omega = parse_double(key, value);
    } else if (key == "kappa") {
      c.params.kappa = parse_double(key, value);
    } else if (key == "Gamma") {
      c.params.Gamma = parse_double(key, value);
    } else if (key == "T") {
      c.params.T = parse_double(key, value);
    } else if (key == "Tc") {
      baths.Tc = parse_double(key, value);
    } else if (key == "common-bath") {
      common = parse_bool(key, value);
    } else if (key == "lambda") {
      c.params.lambda = parse_double(key, value);
    } else if (key == "lambda-min") {
      c.lambda_min = parse_double(key, value);
    } else if (key == "lambda-max") {
      c.lambda_max = parse_double(key, value);
    } else if (key == "steps") {
      c.steps = static_cast<int>(parse_long(key, value));
    } else if (key == "relative-grid") {
      c.relative_grid = parse_bool(key, value);
    } else if (key == "regime") {
      c.regime = parse_regime(value);
    } else if (key == "estimators") {
      c.estimators = parse_estimators(value);
    } else if (key == "N") {
      c.repetitions = parse_long(key, value);
    } else if (key == "output") {
      c.output = value.empty() ? "-" : value;
    } else if (key == "format") {
      if (value == "csv") {
        c.format = OutputFormat::Csv;
      } else if (value == "json") {
        c.format = OutputFormat::Json;
      } else {
        bad_value(key, value, "csv or json");
      }
    } else {
      throw DomainError("unknown key '" + key + "'");
    }
  }
  if (common) {
    c.params.scenario = CommonBath{};
  } else {
    c.params.scenario = baths;
  }

  c.params.validate();
  if (c.steps < 1) throw DomainError("invalid parameters: steps >= 1");
  if (c.repetitions < 1) throw DomainError("invalid parameters: N >= 1");
  if (!(c.lambda_min >= 0.0 && c.lambda_min <= c.lambda_max && std::isfinite(c.lambda_max))) {
    throw DomainError("invalid parameters: 0 <= lambda-min <= lambda-max");
  }
  return c;
}

KeyValues to_key_values(const RunConfig& c) {
  KeyValues kv;
  kv["omega0"] = format_number(c.params.omega0);
  kv["Omega"] = format_number(c.params.Omega);
  kv["kappa"] = format_number(c.params.kappa);
  kv["Gamma"] = format_number(c.params.Gamma);
  kv["T"] = format_number(c.params.T);
  const auto* baths = std::get_if<IndependentBaths>(&c.params.scenario);
  kv["Tc"] = format_number(baths ? baths->Tc : c.params.T);
  kv["common-bath"] = c.params.common_bath() ? "true" : "false";
  kv["lambda"] = format_number(c.params.lambda);
  kv["lambda-min"] = format_number(c.lambda_min);
  kv["lambda-max"] = format_number(c.lambda_max);
  kv["steps"] = std::to_string(c.steps);
  kv["relative-grid"] = c.relative_grid ? "true" : "false";
  kv["regime"] = std::string(regime_choice_name(c.regime));
  std::string est;
  for (const auto e : c.estimators) {
    if (!est.empty()) est += ',';
    est += to_string(e);
  }
  kv["estimators"] = est;
  kv["N"] = std::to_string(c.repetitions);
  kv["output"] = c.output;
  kv["format"] = c.format == OutputFormat::Csv ? "csv" : "json";
  return kv;
}

Regime resolve_regime(const RunConfig& c) {
  switch (c.regime) {
    case RegimeChoice::Auto:
      return select_regime(c.params);
    case RegimeChoice::Spin:
      return Regime::SpinEliminated;
    case RegimeChoice::Cavity:
      return Regime::CavityEliminated;
    case RegimeChoice::Lyapunov:
      return Regime::Lyapunov;
  }
  return Regime::Lyapunov;
}

std::vector<double> lambda_grid(const RunConfig& c) {
  std::vector<double> grid;
  const auto linear = [&](double lo, double hi) {
    std::vector<double> g;
    for (int i = 0; i < c.steps; ++i) {
      g.push_back(c.steps == 1 ? lo : lo + (hi - lo) * i / (c.steps - 1));
    }
    return g;
  };
  if (!c.relative_grid) return linear(c.lambda_min, c.lambda_max);
  const double lambda_c = singular_couplings(c.params).lambda_c;
  grid = c.lambda_max < 1.0 ? critical_grid(c.lambda_min, c.lambda_max, c.steps)
                            : linear(c.lambda_min, c.lambda_max);
  for (double& x : grid) x *= lambda_c;
  return grid;
}

std::string render_csv(const std::vector<SweepRow>& rows, const RunConfig& c) {
  std::ostringstream out;
  out << "lambda,lambda_over_lambda_c,tau,phase,qfi,var_qfi,var_photon,var_q2,var_p2,error\n";
  const bool qfi = selected(c, PrecisionEstimator::QFI);
  for (const auto& r : rows) {
    const bool failed = r.error.has_value();
    out << format_number(r.lambda) << ',' << format_number(r.lambda_over_lambda_c) << ','
        << format_number(value_or_inf(r.tau)) << ',' << to_string(r.phase) << ','
        << (qfi && !failed ? format_number(r.qfi) : "nan") << ',' << cell(r.var_qfi, qfi, failed)
        << ',' << cell(r.var_photon, selected(c, PrecisionEstimator::PhotonNumber), failed) << ','
        << cell(r.var_q2, selected(c, PrecisionEstimator::Q2), failed) << ','
        << cell(r.var_p2, selected(c, PrecisionEstimator::P2), failed) << ','
        << (failed ? sanitize(*r.error) : "") << '\n';
  }
  return out.str();
}

std::string render_json(const std::vector<SweepRow>& rows, const RunConfig& c) {
  using nlohmann::ordered_json;
  // Non-finite values are carried as the same tokens the CSV uses.
  const auto number = [](const std::string& token) -> ordered_json {
    if (token == "inf" || token == "-inf" || token == "nan") return token;
    double v = 0.0;
    std::from_chars(token.data(), token.data() + token.size(), v);
    return v;
  };

  ordered_json doc;
  ordered_json meta;
  meta["version"] = kVersion;
  meta["regime"] = std::string(to_string(resolve_regime(c)));
  ordered_json config = ordered_json::object();
  const KeyValues kv = to_key_values(c);
  for (const auto& key : config_keys()) config[key] = kv.at(key);
  meta["config"] = config;
  doc["metadata"] = meta;

  ordered_json out_rows = ordered_json::array();
  const bool qfi = selected(c, PrecisionEstimator::QFI);
  for (const auto& r : rows) {
    const bool failed = r.error.has_value();
    ordered_json row;
    row["lambda"] = number(format_number(r.lambda));
    row["lambda_over_lambda_c"] = number(format_number(r.lambda_over_lambda_c));
    row["tau"] = number(format_number(value_or_inf(r.tau)));
    row["phase"] = std::string(to_string(r.phase));
    row["qfi"] = number(qfi && !failed ? format_number(r.qfi) : "nan");
    row["var_qfi"] = number(cell(r.var_qfi, qfi, failed));
    row["var_photon"] = number(cell(r.var_photon, selected(c, PrecisionEstimator::PhotonNumber), failed));
    row["var_q2"] = number(cell(r.var_q2, selected(c, PrecisionEstimator::Q2), failed));
    row["var_p2"] = number(cell(r.var_p2, selected(c, PrecisionEstimator::P2), failed));
    row["error"] = failed ? ordered_json(*r.error) : ordered_json(nullptr);
    out_rows.push_back(row);
  }
  doc["rows"] = out_rows;
  return doc.dump(2) + "\n";
}

std::string diagnose_report(const RunConfig& c) {
  const SystemParams& p = c.params;
  const PhaseDiagnosis diag = classify_regime(p);
  std::ostringstream out;
  out << std::setprecision(10);
  out << "lambda        " << p.lambda << '\n'
      << "lambda_c      " << diag.lambda_c << '\n'
      << "lambda_ep     " << diag.lambda_ep << '\n'
      << "n (spin bath) " << p.n() << '\n'
      << "n_c (cavity)  " << p.n_c() << '\n'
      << "phase         " << to_string(diag.phase) << '\n'
      << "anti-PT       " << to_string(diag.anti_pt) << '\n'
      << "tau           " << format_number(value_or_inf(diag.tau)) << '\n'
      << "fixed points\n";
  for (const FixedPoint& fp : mean_field_fixed_points(p)) {
    const LinearSystem sys = linearized_system(p, fp);
    const StabilitySpectrum full = stability_spectrum(sys);
    const StabilitySpectrum transverse = transverse_spectrum(sys);
    out << "  " << to_string(fp.phase) << ": Q=" << fp.q_mean << " P=" << fp.p_mean
        << " sx=" << fp.sx << " sy=" << fp.sy << " sz=" << fp.sz << '\n';
    out << "    residual      " << mean_field_flow(fp.state(), p).cwiseAbs().maxCoeff() << '\n';
    const auto print_spectrum = [&](const char* label, const StabilitySpectrum& s) {
      std::vector<double> re = s.eigen_real_parts;
      std::sort(re.begin(), re.end());
      const double smallest = *std::min_element(re.begin(), re.end(), [](double a, double b) {
        return std::abs(a) < std::abs(b);
      });
      out << "    " << label << (s.stable ? "stable" : "unstable") << ", Re(eig) =";
      for (double v : re) out << ' ' << v;
      out << ", min |Re| = " << std::abs(smallest) << '\n';
    };
    print_spectrum("full drift    ", full);
    print_spectrum("dsz frozen    ", transverse);
  }
  return out.str();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Steady-state thermometry with a dissipative quantum Rabi probe", "rabitherm"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_options;
  const std::map<std::string, std::string> descriptions{
      {"omega0", "cavity frequency"},
      {"Omega", "spin frequency"},
      {"kappa", "cavity decay rate"},
      {"Gamma", "spin decay rate"},
      {"T", "temperature of the probed (spin) bath"},
      {"Tc", "cavity bath temperature (independent baths)"},
      {"lambda", "coupling strength (diagnose)"},
      {"lambda-min", "grid start (fraction of lambda_c with --relative-grid)"},
      {"lambda-max", "grid end (fraction of lambda_c with --relative-grid)"},
      {"steps", "number of grid points"},
      {"regime", "auto | spin | cavity | lyapunov"},
      {"estimators", "comma list of qfi, photon, q2, p2"},
      {"N", "number of repetitions"},
      {"output", "output path, '-' for stdout"},
      {"format", "csv | json"}};
  for (const auto& [key, text] : descriptions) {
    flag_options[key] = app.add_option("--" + key, flag_values[key], text);
  }
  bool common = false;
  bool relative = true;
  auto* common_flag =
      app.add_flag("--common-bath,!--independent-baths", common, "cavity shares the probed bath");
  auto* relative_flag = app.add_flag("--relative-grid,!--absolute-grid", relative,
                                     "grid bounds are fractions of lambda_c");
  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file");

  auto* diagnose = app.add_subcommand("diagnose", "phase diagram, fixed points and stability");
  auto* sweep_cmd = app.add_subcommand("sweep", "temperature precision along a lambda grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    KeyValues merged;
    if (!config_path.empty()) merged = load_config_file(config_path);
    for (const auto& [key, option] : flag_options) {
      if (option->count() > 0) merged[key] = flag_values[key];
    }
    if (common_flag->count() > 0) merged["common-bath"] = common ? "true" : "false";
    if (relative_flag->count() > 0) merged["relative-grid"] = relative ? "true" : "false";
    const RunConfig config = resolve_config(merged);

    if (diagnose->parsed()) {
      out << diagnose_report(config);
      return 0;
    }
    if (sweep_cmd->parsed()) {
      const std::vector<SweepRow> rows =
          sweep(config.params, lambda_grid(config), resolve_regime(config), config.repetitions);
      const std::string text = config.format == OutputFormat::Csv ? render_csv(rows, config)
                                                                  : render_json(rows, config);
      if (config.output == "-") {
        out << text;
      } else {
        std::ofstream file(config.output, std::ios::binary);
        if (!file) throw IoError("cannot open output file '" + config.output + "'");
        file << text;
        file.flush();
        if (!file) throw IoError("failed writing output file '" + config.output + "'");
      }
      return 0;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace rabitherm
