#pragma once

#include <array>
#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace epmdi {

using Complex = std::complex<double>;

/// Photon occupation of one optical port. `h` counts photons in the first
/// polarization mode of the working frame, `v` in the second. In the
/// rectilinear frame the modes are (H, V); in the diagonal frame (+45, -45).
struct Occupation {
  int h = 0;
  int v = 0;

  int total() const { return h + v; }
  auto operator<=>(const Occupation&) const = default;
};

enum class Basis : std::uint8_t { z, x };

/// One of the four BB84 polarization signal states.
struct BB84State {
  Basis basis = Basis::z;
  int bit = 0;
};

/// Polarization coefficients (on H, V) of a BB84 signal state.
std::array<double, 2> bb84_encode(const BB84State& state);

/// Classical probability table over per-port photon occupations.
///
/// Probabilities for occupations beyond `n_max` total photons are not stored;
/// their summed mass is kept in `truncated_tail` so that the represented mass
/// plus the tail is a proper probability.
struct PhotonNumberDistribution {
  std::map<Occupation, double> entries;
  int n_max = 0;
  double truncated_tail = 0.0;

  double probability(const Occupation& occ) const;
  /// Sum of all stored probabilities (= 1 - truncated_tail for a source).
  double total_mass() const;
};

/// Complex-amplitude superposition over joint occupations of labeled ports.
/// The squared norm may be below one when the generating expansion was
/// truncated.
struct AmplitudeState {
  std::vector<std::string> ports;
  std::map<std::vector<Occupation>, Complex> entries;

  double norm_sq() const;
  void add(const std::vector<Occupation>& key, Complex amplitude);
};

double poisson_pmf(int n, double mu);
/// Upper Poisson tail P(N > n_max), summed term by term from above.
double poisson_tail(double mu, int n_max);

/// Phase-randomized weak coherent pulse: diagonal Poisson mixture over the
/// photon number of a single mode, truncated at n_max.
PhotonNumberDistribution wcp_distribution(double mu, int n_max);

/// Pair-number distribution of the type-II down-conversion source,
/// P(n) = (n+1) lambda^n / (1+lambda)^(n+2).
double pdc_pair_probability(double lambda, int n);
/// Closed-form tail sum of pdc_pair_probability beyond n_max.
double pdc_pair_tail(double lambda, int n_max);

/// Two-port entangled state of a type-II down-conversion source truncated at
/// n_max photon pairs. Ports are labeled "david" and "ethan"; the n-pair
/// component is the alternating-sign sum over polarization splittings whose
/// squared weight reproduces pdc_pair_probability(lambda, n).
AmplitudeState pdc_state(double lambda, int n_max);

}  // namespace epmdi
