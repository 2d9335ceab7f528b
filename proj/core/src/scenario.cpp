#include "epmdi/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace epmdi {

double ScenarioParams::worst_source_tail() const {
  return std::max({poisson_tail(mu_a, n_max), poisson_tail(mu_b, n_max),
                   pdc_pair_tail(lambda, n_max)});
}

ConfigError::ConfigError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + ": " + message
                                  : "config: " + message),
      line_(line) {}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& value, int line, const std::string& key) {
  const std::string v = trim(value);
  if (v.empty()) throw ConfigError(line, "empty value for '" + key + "'");
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size()) {
    throw ConfigError(line, "invalid number '" + v + "' for '" + key + "'");
  }
  if (!std::isfinite(out)) {
    throw ConfigError(line, "non-finite value for '" + key + "'");
  }
  return out;
}

long long parse_int(const std::string& value, int line, const std::string& key) {
  const std::string v = trim(value);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError(line, "invalid integer '" + v + "' for '" + key + "'");
  }
  return out;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  std::vector<std::string> seen;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line_no, "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "missing key");
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw ConfigError(line_no, "duplicate key '" + key + "'");
    }
    seen.push_back(key);

    if (key == "eta_d") {
      cfg.det.eta_d = parse_double(value, line_no, key);
    } else if (key == "y0") {
      cfg.det.y0 = parse_double(value, line_no, key);
    } else if (key == "e_d") {
      cfg.e_d = parse_double(value, line_no, key);
    } else if (key == "alpha_db_per_km") {
      cfg.alpha_db_per_km = parse_double(value, line_no, key);
    } else if (key == "f_e") {
      cfg.f_e = parse_double(value, line_no, key);
    } else if (key == "n_max") {
      cfg.n_max = static_cast<int>(parse_int(value, line_no, key));
    } else if (key == "tail_tolerance") {
      cfg.tail_tolerance = parse_double(value, line_no, key);
    } else if (key == "mode") {
      if (value == "asymptotic") {
        cfg.mode = RateMode::asymptotic;
      } else if (value == "finite") {
        cfg.mode = RateMode::finite_key;
      } else {
        throw ConfigError(line_no, "mode must be 'asymptotic' or 'finite'");
      }
    } else if (key == "finite_n_pulses") {
      cfg.finite_n_pulses = parse_double(value, line_no, key);
    } else if (key == "finite_epsilon") {
      cfg.finite_epsilon = parse_double(value, line_no, key);
    } else if (key == "decoy_nu1") {
      if (value == "optimize") {
        cfg.decoy_nu1.reset();
      } else {
        cfg.decoy_nu1 = parse_double(value, line_no, key);
      }
    } else if (key == "decoy_nu2") {
      cfg.decoy_nu2 = parse_double(value, line_no, key);
    } else if (key == "misalignment_sampling") {
      if (value == "fixed") {
        cfg.sampling = MisalignmentSampling::fixed;
      } else if (value == "monte_carlo") {
        cfg.sampling = MisalignmentSampling::monte_carlo;
      } else {
        throw ConfigError(line_no, "misalignment_sampling must be 'fixed' or 'monte_carlo'");
      }
    } else if (key == "mc_seed") {
      cfg.mc_seed = static_cast<std::uint64_t>(parse_int(value, line_no, key));
    } else if (key == "mc_draws") {
      cfg.mc_draws = static_cast<int>(parse_int(value, line_no, key));
    } else {
      throw ConfigError(line_no, "unknown key '" + key + "'");
    }
  }
  validate_config(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "eta_d = " << format_double(cfg.det.eta_d) << "\n";
  out << "y0 = " << format_double(cfg.det.y0) << "\n";
  out << "e_d = " << format_double(cfg.e_d) << "\n";
  out << "alpha_db_per_km = " << format_double(cfg.alpha_db_per_km) << "\n";
  out << "f_e = " << format_double(cfg.f_e) << "\n";
  out << "n_max = " << cfg.n_max << "\n";
  out << "tail_tolerance = " << format_double(cfg.tail_tolerance) << "\n";
  out << "mode = " << (cfg.mode == RateMode::asymptotic ? "asymptotic" : "finite") << "\n";
  out << "finite_n_pulses = " << format_double(cfg.finite_n_pulses) << "\n";
  out << "finite_epsilon = " << format_double(cfg.finite_epsilon) << "\n";
  if (cfg.decoy_nu1.has_value()) {
    out << "decoy_nu1 = " << format_double(*cfg.decoy_nu1) << "\n";
  } else {
    out << "decoy_nu1 = optimize\n";
  }
  out << "decoy_nu2 = " << format_double(cfg.decoy_nu2) << "\n";
  out << "misalignment_sampling = "
      << (cfg.sampling == MisalignmentSampling::fixed ? "fixed" : "monte_carlo") << "\n";
  out << "mc_seed = " << cfg.mc_seed << "\n";
  out << "mc_draws = " << cfg.mc_draws << "\n";
  return out.str();
}

void validate_config(const ScenarioConfig& cfg) {
  const auto fail = [](const std::string& msg) { throw ConfigError(0, msg); };
  if (cfg.det.eta_d < 0.0 || cfg.det.eta_d > 1.0) fail("eta_d must be in [0, 1]");
  if (cfg.det.y0 < 0.0 || cfg.det.y0 > 1.0) fail("y0 must be in [0, 1]");
  if (cfg.e_d < 0.0 || cfg.e_d > 1.0) fail("e_d must be in [0, 1]");
  if (cfg.alpha_db_per_km < 0.0) fail("alpha_db_per_km must be >= 0");
  if (cfg.f_e < 1.0) fail("f_e must be >= 1");
  if (cfg.n_max < 1 || cfg.n_max > 8) fail("n_max must be in [1, 8]");
  if (!(cfg.tail_tolerance > 0.0)) fail("tail_tolerance must be > 0");
  if (cfg.finite_n_pulses < 1.0) fail("finite_n_pulses must be >= 1");
  if (!(cfg.finite_epsilon > 0.0) || cfg.finite_epsilon >= 1.0) {
    fail("finite_epsilon must be in (0, 1)");
  }
  if (cfg.decoy_nu1.has_value() && *cfg.decoy_nu1 < 0.0) fail("decoy_nu1 must be >= 0");
  if (cfg.decoy_nu2 < 0.0) fail("decoy_nu2 must be >= 0");
  if (cfg.decoy_nu1.has_value() && *cfg.decoy_nu1 <= cfg.decoy_nu2) {
    fail("decoy_nu1 must exceed decoy_nu2");
  }
  if (cfg.sampling == MisalignmentSampling::monte_carlo && cfg.mc_draws < 1) {
    fail("mc_draws must be >= 1 in monte_carlo sampling");
  }
}

ScenarioParams build_scenario_with_angles(const ScenarioConfig& cfg,
                                          double total_loss_db, double mu_a,
                                          double mu_b, double lambda,
                                          const LossSplit& split,
                                          const std::array<double, 4>& thetas) {
  if (total_loss_db < 0.0) {
    throw std::invalid_argument("build_scenario: total loss must be >= 0");
  }
  if (mu_a < 0.0 || mu_b < 0.0 || lambda < 0.0) {
    throw std::invalid_argument("build_scenario: intensities must be >= 0");
  }
  if (split.split_a < 0.0 || split.split_a > 1.0 || split.split_b < 0.0 ||
      split.split_b > 1.0) {
    throw std::invalid_argument("build_scenario: splits must be in [0, 1]");
  }
  const double arm = total_loss_db / 2.0;
  ScenarioParams sc;
  sc.mu_a = mu_a;
  sc.mu_b = mu_b;
  sc.lambda = lambda;
  sc.ch_a = ChannelParams::from_loss_db(split.split_a * arm, cfg.alpha_db_per_km, thetas[0]);
  sc.ch_d = ChannelParams::from_loss_db((1.0 - split.split_a) * arm, cfg.alpha_db_per_km, thetas[1]);
  sc.ch_e = ChannelParams::from_loss_db((1.0 - split.split_b) * arm, cfg.alpha_db_per_km, thetas[2]);
  sc.ch_b = ChannelParams::from_loss_db(split.split_b * arm, cfg.alpha_db_per_km, thetas[3]);
  sc.det = cfg.det;
  sc.n_max = cfg.n_max;
  sc.tail_tolerance = cfg.tail_tolerance;
  return sc;
}

ScenarioParams build_scenario(const ScenarioConfig& cfg, double total_loss_db,
                              double mu_a, double mu_b, double lambda,
                              const LossSplit& split) {
  return build_scenario_with_angles(cfg, total_loss_db, mu_a, mu_b, lambda, split,
                                    misalignment_split(cfg.e_d));
}

}  // namespace epmdi
