#include "epmdi/decoy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace epmdi {

void IntensitySet::validate() const {
  if (signal < 0.0) throw std::invalid_argument("IntensitySet: signal must be >= 0");
  double prev = signal;
  for (double d : decoys) {
    if (d < 0.0) throw std::invalid_argument("IntensitySet: decoys must be >= 0");
    if (d >= prev) {
      throw std::invalid_argument("IntensitySet: intensities must be strictly decreasing");
    }
    prev = d;
  }
}

std::vector<double> IntensitySet::all() const {
  std::vector<double> out{signal};
  out.insert(out.end(), decoys.begin(), decoys.end());
  return out;
}

ObservableTable simulate_observables(const ScenarioParams& scenario,
                                     const IntensitySet& alice,
                                     const IntensitySet& bob,
                                     const OutcomeEngine* engine) {
  alice.validate();
  bob.validate();
  std::optional<OutcomeEngine> local;
  if (engine == nullptr) {
    local.emplace(scenario.det, scenario.n_max);
    engine = &*local;
  }
  const PdcDensity rho = make_pdc_density(propagate_epr(
      pdc_state(scenario.lambda, scenario.n_max), scenario.ch_d, scenario.ch_e,
      scenario.n_max));

  ObservableTable table;
  table.a_intensities = alice.all();
  table.b_intensities = bob.all();
  table.cells.resize(table.a_intensities.size());
  for (std::size_t i = 0; i < table.a_intensities.size(); ++i) {
    table.cells[i].resize(table.b_intensities.size());
    for (std::size_t j = 0; j < table.b_intensities.size(); ++j) {
      const double ma = table.a_intensities[i];
      const double mb = table.b_intensities[j];
      const BasisGain z =
          basis_gain_for_intensities(scenario, Basis::z, ma, mb, *engine, rho);
      const BasisGain x =
          basis_gain_for_intensities(scenario, Basis::x, ma, mb, *engine, rho);
      ObservableCell& cell = table.cells[i][j];
      cell.q_z = z.gain;
      cell.eq_z = z.error_gain;
      if (z.gain > 0.0) cell.e_z = z.error_gain / z.gain;
      cell.q_x = x.gain;
      cell.eq_x = x.error_gain;
      if (x.gain > 0.0) cell.e_x = x.error_gain / x.gain;
    }
  }
  return table;
}

namespace {

using Real = long double;

struct DecoySystem {
  double mu_a, nu1_a, nu2_a;
  double mu_b, nu1_b, nu2_b;
  std::size_t i_mu = 0, i_nu1 = 1, i_nu2;
  std::size_t j_mu = 0, j_nu1 = 1, j_nu2;
};

DecoySystem decoy_system(const ObservableTable& table) {
  if (table.a_intensities.size() < 3 || table.b_intensities.size() < 3) {
    throw std::invalid_argument(
        "estimate_single_photon_bounds: need a signal and two decoys per party");
  }
  DecoySystem sys;
  sys.i_nu2 = table.a_intensities.size() - 1;
  sys.j_nu2 = table.b_intensities.size() - 1;
  sys.mu_a = table.a_intensities[0];
  sys.nu1_a = table.a_intensities[1];
  sys.nu2_a = table.a_intensities[sys.i_nu2];
  sys.mu_b = table.b_intensities[0];
  sys.nu1_b = table.b_intensities[1];
  sys.nu2_b = table.b_intensities[sys.j_nu2];
  return sys;
}

// Largest ratio of the multi-photon expansion coefficients between the decoy
// and the signal difference system, over 3 <= n+m with n, m >= 1. Yields
// beyond 16 photons per party carry no weight at the truncations in use.
Real contamination_ratio(const DecoySystem& s) {
  constexpr int kRange = 16;
  const auto diff = [](double hi, double lo, int n) {
    return std::pow(static_cast<Real>(hi), n) - std::pow(static_cast<Real>(lo), n);
  };
  Real best = 0.0L;
  for (int n = 1; n <= kRange; ++n) {
    for (int m = 1; m <= kRange; ++m) {
      if (n + m < 3) continue;
      const Real denom = diff(s.mu_a, s.nu2_a, n) * diff(s.mu_b, s.nu2_b, m);
      if (denom <= 0.0L) continue;
      const Real ratio = diff(s.nu1_a, s.nu2_a, n) * diff(s.nu1_b, s.nu2_b, m) / denom;
      best = std::max(best, ratio);
    }
  }
  return best;
}

struct Coefficient {
  std::size_t i, j;
  Real weight;  // on the reweighted gain e^{a+b} Q
};

// Worst-cases each observable by delta in the direction that degrades the
// linear combination, then evaluates it. `maximize` picks the degradation
// direction: false -> smallest value (lower bounds), true -> largest.
Real worst_case_combination(const ObservableTable& table,
                            const std::vector<Coefficient>& coefs, bool use_x,
                            bool error_gain, double delta, bool maximize) {
  Real sum = 0.0L;
  for (const Coefficient& c : coefs) {
    const ObservableCell& cell = table.at(c.i, c.j);
    double q = error_gain ? (use_x ? cell.eq_x : cell.eq_z)
                          : (use_x ? cell.q_x : cell.q_z);
    const bool degrade_down = maximize ? c.weight < 0.0L : c.weight > 0.0L;
    q = degrade_down ? std::max(0.0, q - delta) : std::min(1.0, q + delta);
    const Real scale = std::exp(static_cast<Real>(table.a_intensities[c.i]) +
                                static_cast<Real>(table.b_intensities[c.j]));
    sum += c.weight * scale * static_cast<Real>(q);
  }
  return sum;
}

SinglePhotonBounds bounds_with_deviation(const ObservableTable& table,
                                         double delta) {
  const DecoySystem s = decoy_system(table);
  SinglePhotonBounds out;

  if (s.nu1_a <= s.nu2_a || s.nu1_b <= s.nu2_b || s.mu_a <= s.nu1_a ||
      s.mu_b <= s.nu1_b) {
    throw std::invalid_argument(
        "estimate_single_photon_bounds: intensities must satisfy mu > nu1 > nu2");
  }
  // Nearly coinciding signal and decoy leave nothing to separate on.
  if ((s.mu_a - s.nu1_a) < 1e-9 * s.mu_a || (s.mu_b - s.nu1_b) < 1e-9 * s.mu_b) {
    out.degenerate = true;
  }

  const Real c = contamination_ratio(s);
  const Real dn1a = static_cast<Real>(s.nu1_a) - s.nu2_a;
  const Real dn1b = static_cast<Real>(s.nu1_b) - s.nu2_b;
  const Real dmua = static_cast<Real>(s.mu_a) - s.nu2_a;
  const Real dmub = static_cast<Real>(s.mu_b) - s.nu2_b;
  const Real denom = dn1a * dn1b - c * dmua * dmub;

  const std::vector<Coefficient> y11_coefs{
      {s.i_nu1, s.j_nu1, 1.0L},  {s.i_nu1, s.j_nu2, -1.0L},
      {s.i_nu2, s.j_nu1, -1.0L}, {s.i_nu2, s.j_nu2, 1.0L - c},
      {s.i_mu, s.j_mu, -c},      {s.i_mu, s.j_nu2, c},
      {s.i_nu2, s.j_mu, c}};
  const std::vector<Coefficient> w_coefs{{s.i_nu1, s.j_nu1, 1.0L},
                                         {s.i_nu1, s.j_nu2, -1.0L},
                                         {s.i_nu2, s.j_nu1, -1.0L},
                                         {s.i_nu2, s.j_nu2, 1.0L}};

  const auto y11_lower = [&](bool use_x) {
    if (denom <= 0.0L) {
      out.degenerate = true;
      out.clamped = true;
      return 0.0;
    }
    const Real numer =
        worst_case_combination(table, y11_coefs, use_x, false, delta, false);
    Real y = numer / denom;
    if (y < 0.0L) {
      out.clamped = true;
      y = 0.0L;
    }
    return static_cast<double>(std::min(y, static_cast<Real>(1.0L)));
  };

  out.y11_z_lower = y11_lower(false);
  out.y11_x_lower = y11_lower(true);

  if (out.y11_x_lower > 0.0) {
    const Real w =
        worst_case_combination(table, w_coefs, true, true, delta, true);
    Real e = std::max(w, 0.0L) / (dn1a * dn1b * static_cast<Real>(out.y11_x_lower));
    if (e > 1.0L) {
      e = 1.0L;
      out.clamped = true;
    }
    out.e11_x_upper = static_cast<double>(e);
  } else {
    out.e11_x_upper = 1.0;
    out.degenerate = true;
  }
  return out;
}

}  // namespace

SinglePhotonBounds estimate_single_photon_bounds(const ObservableTable& table) {
  return bounds_with_deviation(table, 0.0);
}

FiniteKeyResult finite_key_rate(const SinglePhotonBounds& asymptotic,
                                const ObservableTable& table,
                                const FiniteKeyParams& fk, double f_e) {
  if (fk.n_pulses < 1.0) {
    throw std::invalid_argument("finite_key_rate: n_pulses must be >= 1");
  }
  if (!(fk.epsilon > 0.0) || fk.epsilon >= 1.0) {
    throw std::invalid_argument("finite_key_rate: epsilon must be in (0, 1)");
  }
  // Uniform intensity choice over three settings per party and uniform basis
  // choice put N/36 pulse pairs behind each estimated observable; the epsilon
  // budget splits evenly over the 27 estimated quantities.
  const double epsilon_each = fk.epsilon / 27.0;
  const double trials = fk.n_pulses / 36.0;
  const double delta = std::sqrt(std::log(2.0 / epsilon_each) / (2.0 * trials));

  FiniteKeyResult res;
  res.bounds = bounds_with_deviation(table, delta);
  // Deviations can only degrade the asymptotic estimate.
  res.bounds.y11_z_lower = std::min(res.bounds.y11_z_lower, asymptotic.y11_z_lower);
  res.bounds.y11_x_lower = std::min(res.bounds.y11_x_lower, asymptotic.y11_x_lower);
  res.bounds.e11_x_upper = std::max(res.bounds.e11_x_upper, asymptotic.e11_x_upper);

  const DecoySystem s = decoy_system(table);
  const double p11 = single_single_probability(s.mu_a, s.mu_b);
  const ObservableCell& signal = table.at(s.i_mu, s.j_mu);

  const double e11_capped = std::min(res.bounds.e11_x_upper, 0.5);
  const double privacy =
      p11 * res.bounds.y11_z_lower * (1.0 - binary_entropy(e11_capped));
  double leak = 0.0;
  if (signal.e_z.has_value()) {
    leak = signal.q_z * f_e * binary_entropy(*signal.e_z);
  }
  res.rate_raw = privacy - leak;
  res.rate = std::max(0.0, res.rate_raw);
  res.insufficient = res.bounds.y11_z_lower <= 0.0;
  return res;
}

}  // namespace epmdi
