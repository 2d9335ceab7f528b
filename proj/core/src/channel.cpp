#include "epmdi/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "epmdi/mode_transform.hpp"

namespace epmdi {

double transmittance_from_length(double length_km, double alpha_db_per_km) {
  if (length_km < 0.0) {
    throw std::invalid_argument("transmittance_from_length: length must be >= 0");
  }
  if (alpha_db_per_km < 0.0) {
    throw std::invalid_argument("transmittance_from_length: alpha must be >= 0");
  }
  return std::pow(10.0, -alpha_db_per_km * length_km / 10.0);
}

ChannelParams ChannelParams::from_length(double length_km, double alpha_db_per_km,
                                         double theta_rad) {
  ChannelParams ch;
  ch.length_km = length_km;
  ch.alpha_db_per_km = alpha_db_per_km;
  ch.transmittance = transmittance_from_length(length_km, alpha_db_per_km);
  ch.theta_rad = theta_rad;
  return ch;
}

ChannelParams ChannelParams::from_loss_db(double loss_db, double alpha_db_per_km,
                                          double theta_rad) {
  if (loss_db < 0.0) {
    throw std::invalid_argument("ChannelParams::from_loss_db: loss must be >= 0");
  }
  ChannelParams ch;
  ch.alpha_db_per_km = alpha_db_per_km;
  ch.length_km = alpha_db_per_km > 0.0 ? loss_db / alpha_db_per_km : 0.0;
  ch.transmittance = std::pow(10.0, -loss_db / 10.0);
  ch.theta_rad = theta_rad;
  return ch;
}

ChannelParams ChannelParams::from_transmittance(double transmittance,
                                                double theta_rad) {
  if (transmittance < 0.0 || transmittance > 1.0) {
    throw std::invalid_argument(
        "ChannelParams::from_transmittance: transmittance must be in [0, 1]");
  }
  ChannelParams ch;
  ch.transmittance = transmittance;
  ch.theta_rad = theta_rad;
  ch.length_km = transmittance > 0.0
                     ? -10.0 * std::log10(transmittance) / ch.alpha_db_per_km
                     : 0.0;
  return ch;
}

std::array<double, 4> misalignment_split(double e_d) {
  if (e_d < 0.0 || e_d > 1.0) {
    throw std::invalid_argument("misalignment_split: e_d must be in [0, 1]");
  }
  const double theta = std::asin(std::sqrt(e_d / 4.0));
  return {theta, theta, theta, theta};
}

PhotonNumberDistribution propagate_wcp(double mu, const BB84State& pol,
                                       const ChannelParams& ch, int n_max) {
  if (mu < 0.0) throw std::invalid_argument("propagate_wcp: mu must be >= 0");
  if (n_max < 0) throw std::invalid_argument("propagate_wcp: n_max must be >= 0");
  const double c = std::cos(ch.theta_rad);
  const double s = std::sin(ch.theta_rad);
  // Probability that a photon lands in the first mode of the encoding frame.
  const double p1 = pol.bit == 0 ? c * c : s * s;
  const double mean = mu * ch.transmittance;

  PhotonNumberDistribution dist;
  dist.n_max = n_max;
  for (int n = 0; n <= n_max; ++n) {
    const double pn = poisson_pmf(n, mean);
    for (int m = 0; m <= n; ++m) {
      dist.entries[{m, n - m}] =
          pn * binomial(n, m) * std::pow(p1, m) * std::pow(1.0 - p1, n - m);
    }
  }
  dist.truncated_tail = poisson_tail(mean, n_max);
  return dist;
}

PhotonNumberDistribution propagate_single_photon(const BB84State& pol,
                                                 const ChannelParams& ch,
                                                 int n_max) {
  if (n_max < 1) {
    throw std::invalid_argument("propagate_single_photon: n_max must be >= 1");
  }
  const double c = std::cos(ch.theta_rad);
  const double s = std::sin(ch.theta_rad);
  const double p1 = pol.bit == 0 ? c * c : s * s;
  const double t = ch.transmittance;
  PhotonNumberDistribution dist;
  dist.n_max = n_max;
  dist.entries[{0, 0}] = 1.0 - t;
  dist.entries[{1, 0}] = t * p1;
  dist.entries[{0, 1}] = t * (1.0 - p1);
  dist.truncated_tail = 0.0;
  return dist;
}

double LossRecordMixture::total_probability() const {
  double sum = 0.0;
  for (const auto& [record, state] : components) sum += state.norm_sq();
  return sum;
}

namespace {

struct LossBranch {
  Occupation survivors;
  Occupation lost;
  double amplitude;
};

// All ways to lose photons from (h, v) through a channel of transmittance t,
// with the square-root binomial amplitudes of a beam-splitter environment.
std::vector<LossBranch> loss_branches(const Occupation& occ, double t) {
  const double sq_t = std::sqrt(t);
  const double sq_l = std::sqrt(1.0 - t);
  std::vector<LossBranch> branches;
  branches.reserve((occ.h + 1) * (occ.v + 1));
  for (int sh = occ.h; sh >= 0; --sh) {
    for (int sv = occ.v; sv >= 0; --sv) {
      const int lost = occ.h - sh + occ.v - sv;
      if (t == 0.0 && sh + sv > 0) continue;
      if (t == 1.0 && lost > 0) continue;
      const double amp = std::sqrt(binomial(occ.h, sh) * binomial(occ.v, sv)) *
                         std::pow(sq_t, sh + sv) * std::pow(sq_l, lost);
      branches.push_back({{sh, sv}, {occ.h - sh, occ.v - sv}, amp});
    }
  }
  return branches;
}

}  // namespace

LossRecordMixture propagate_epr(const AmplitudeState& pdc,
                                const ChannelParams& ch_d,
                                const ChannelParams& ch_e, int n_max) {
  if (pdc.ports.size() != 2) {
    throw std::invalid_argument("propagate_epr: expected a two-port state");
  }
  const ModeMatrix rot_d = rotation_matrix(ch_d.theta_rad);
  const ModeMatrix rot_e = rotation_matrix(ch_e.theta_rad);

  LossRecordMixture mix;
  for (const auto& [key, amp] : pdc.entries) {
    const Occupation& occ_d = key[0];
    const Occupation& occ_e = key[1];
    if (occ_d.total() > n_max || occ_e.total() > n_max) continue;
    for (const LossBranch& bd : loss_branches(occ_d, ch_d.transmittance)) {
      const auto spread_d = two_mode_transform(bd.survivors.h, bd.survivors.v, rot_d);
      for (const LossBranch& be : loss_branches(occ_e, ch_e.transmittance)) {
        const auto spread_e = two_mode_transform(be.survivors.h, be.survivors.v, rot_e);
        AmplitudeState& component = mix.components[{bd.lost, be.lost}];
        if (component.ports.empty()) component.ports = pdc.ports;
        const Complex base = amp * bd.amplitude * be.amplitude;
        const int nd = bd.survivors.total();
        const int ne = be.survivors.total();
        for (int zd = 0; zd <= nd; ++zd) {
          if (spread_d[zd] == Complex{}) continue;
          for (int ze = 0; ze <= ne; ++ze) {
            if (spread_e[ze] == Complex{}) continue;
            component.add({Occupation{zd, nd - zd}, Occupation{ze, ne - ze}},
                          base * spread_d[zd] * spread_e[ze]);
          }
        }
      }
    }
  }
  return mix;
}

}  // namespace epmdi
