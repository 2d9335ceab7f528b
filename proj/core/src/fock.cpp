#include "epmdi/fock.hpp"

#include <cmath>
#include <stdexcept>

namespace epmdi {

std::array<double, 2> bb84_encode(const BB84State& state) {
  if (state.bit != 0 && state.bit != 1) {
    throw std::invalid_argument("bb84_encode: bit must be 0 or 1");
  }
  const double s = 1.0 / std::sqrt(2.0);
  if (state.basis == Basis::z) {
    return state.bit == 0 ? std::array<double, 2>{1.0, 0.0}
                          : std::array<double, 2>{0.0, 1.0};
  }
  return state.bit == 0 ? std::array<double, 2>{s, s}
                        : std::array<double, 2>{s, -s};
}

double PhotonNumberDistribution::probability(const Occupation& occ) const {
  auto it = entries.find(occ);
  return it == entries.end() ? 0.0 : it->second;
}

double PhotonNumberDistribution::total_mass() const {
  double sum = 0.0;
  for (const auto& [occ, p] : entries) sum += p;
  return sum;
}

double AmplitudeState::norm_sq() const {
  double sum = 0.0;
  for (const auto& [key, amp] : entries) sum += std::norm(amp);
  return sum;
}

void AmplitudeState::add(const std::vector<Occupation>& key, Complex amplitude) {
  auto [it, inserted] = entries.emplace(key, amplitude);
  if (!inserted) it->second += amplitude;
}

double poisson_pmf(int n, double mu) {
  if (n < 0) return 0.0;
  if (mu == 0.0) return n == 0 ? 1.0 : 0.0;
  // exp(-mu + n log mu - log n!) keeps intermediate magnitudes sane.
  return std::exp(-mu + n * std::log(mu) - std::lgamma(n + 1.0));
}

double poisson_tail(double mu, int n_max) {
  if (mu < 0.0) throw std::invalid_argument("poisson_tail: mu must be >= 0");
  double tail = 0.0;
  double term = poisson_pmf(n_max + 1, mu);
  for (int n = n_max + 1; term > 0.0; ++n) {
    tail += term;
    term *= mu / (n + 1.0);
    if (term < tail * 1e-20 && n > n_max + 4) break;
  }
  return tail;
}

PhotonNumberDistribution wcp_distribution(double mu, int n_max) {
  if (mu < 0.0) throw std::invalid_argument("wcp_distribution: mu must be >= 0");
  if (n_max < 0) throw std::invalid_argument("wcp_distribution: n_max must be >= 0");
  PhotonNumberDistribution dist;
  dist.n_max = n_max;
  for (int n = 0; n <= n_max; ++n) {
    dist.entries[{n, 0}] = poisson_pmf(n, mu);
  }
  dist.truncated_tail = poisson_tail(mu, n_max);
  return dist;
}

double pdc_pair_probability(double lambda, int n) {
  if (lambda < 0.0) throw std::invalid_argument("pdc_pair_probability: lambda must be >= 0");
  if (n < 0) return 0.0;
  if (lambda == 0.0) return n == 0 ? 1.0 : 0.0;
  return (n + 1.0) * std::pow(lambda, n) / std::pow(1.0 + lambda, n + 2.0);
}

double pdc_pair_tail(double lambda, int n_max) {
  if (lambda < 0.0) throw std::invalid_argument("pdc_pair_tail: lambda must be >= 0");
  if (lambda == 0.0) return 0.0;
  // sum_{n>N} (n+1) x^n = d/dx [x^(N+2)/(1-x)], with x = lambda/(1+lambda).
  const double x = lambda / (1.0 + lambda);
  const int big_n = n_max;
  const double xp = std::pow(x, big_n + 1);
  const double series =
      ((big_n + 2) * xp * (1.0 - x) + xp * x) / ((1.0 - x) * (1.0 - x));
  return series / ((1.0 + lambda) * (1.0 + lambda));
}

AmplitudeState pdc_state(double lambda, int n_max) {
  if (lambda < 0.0) throw std::invalid_argument("pdc_state: lambda must be >= 0");
  if (n_max < 0) throw std::invalid_argument("pdc_state: n_max must be >= 0");
  AmplitudeState state;
  state.ports = {"david", "ethan"};
  // amplitude of the (n, m) branch: (cosh chi)^-2 tanh^n chi * (-1)^m, with
  // occupations |n-m, m> on the david port and |m, n-m> on the ethan port.
  const double cosh2 = 1.0 + lambda;               // cosh^2 chi
  const double tanh1 = std::sqrt(lambda / (1.0 + lambda));  // tanh chi
  for (int n = 0; n <= n_max; ++n) {
    const double weight = std::pow(tanh1, n) / cosh2;
    if (weight == 0.0 && n > 0) continue;
    for (int m = 0; m <= n; ++m) {
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      state.add({Occupation{n - m, m}, Occupation{m, n - m}}, sign * weight);
    }
  }
  return state;
}

}  // namespace epmdi
