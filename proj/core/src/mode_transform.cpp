#include "epmdi/mode_transform.hpp"

#include <cmath>
#include <stdexcept>

namespace epmdi {

namespace {

constexpr int kMaxPhotons = 34;

const std::array<double, kMaxPhotons + 1>& factorials() {
  static const auto table = [] {
    std::array<double, kMaxPhotons + 1> f{};
    f[0] = 1.0;
    for (int n = 1; n <= kMaxPhotons; ++n) f[n] = f[n - 1] * n;
    return f;
  }();
  return table;
}

}  // namespace

double sqrt_factorial(int n) {
  if (n < 0 || n > kMaxPhotons) {
    throw std::invalid_argument("sqrt_factorial: n out of range");
  }
  return std::sqrt(factorials()[n]);
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return factorials()[n] / (factorials()[k] * factorials()[n - k]);
}

std::vector<Complex> two_mode_transform(int n1, int n2, const ModeMatrix& m) {
  if (n1 < 0 || n2 < 0) {
    throw std::invalid_argument("two_mode_transform: photon counts must be >= 0");
  }
  if (n1 + n2 > kMaxPhotons) {
    throw std::invalid_argument("two_mode_transform: photon number exceeds table bounds");
  }
  const int n = n1 + n2;
  std::vector<Complex> out(n + 1, Complex{0.0, 0.0});
  const double in_norm = sqrt_factorial(n1) * sqrt_factorial(n2);
  // Powers of the four matrix entries, reused across the k sum.
  std::vector<Complex> p00(n + 1), p10(n + 1), p01(n + 1), p11(n + 1);
  p00[0] = p10[0] = p01[0] = p11[0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    p00[i] = p00[i - 1] * m[0][0];
    p10[i] = p10[i - 1] * m[1][0];
    p01[i] = p01[i - 1] * m[0][1];
    p11[i] = p11[i - 1] * m[1][1];
  }
  for (int z = 0; z <= n; ++z) {
    Complex sum{0.0, 0.0};
    const int k_lo = std::max(0, z - n2);
    const int k_hi = std::min(z, n1);
    for (int k = k_lo; k <= k_hi; ++k) {
      sum += binomial(n1, k) * binomial(n2, z - k) * p00[k] * p10[n1 - k] *
             p01[z - k] * p11[n2 - z + k];
    }
    out[z] = sum * sqrt_factorial(z) * sqrt_factorial(n - z) / in_norm;
  }
  return out;
}

ModeMatrix rotation_matrix(double theta_rad) {
  const double c = std::cos(theta_rad);
  const double s = std::sin(theta_rad);
  return ModeMatrix{{{Complex{c, 0.0}, Complex{s, 0.0}},
                     {Complex{-s, 0.0}, Complex{c, 0.0}}}};
}

ModeMatrix diagonal_frame_matrix() {
  const double s = 1.0 / std::sqrt(2.0);
  return ModeMatrix{{{Complex{s, 0.0}, Complex{s, 0.0}},
                     {Complex{s, 0.0}, Complex{-s, 0.0}}}};
}

}  // namespace epmdi
