#pragma once

#include <array>
#include <map>

#include "epmdi/fock.hpp"

namespace epmdi {

/// One lossy, misaligned fiber channel.
struct ChannelParams {
  double length_km = 0.0;
  double alpha_db_per_km = 0.21;
  double transmittance = 1.0;
  double theta_rad = 0.0;

  static ChannelParams from_length(double length_km, double alpha_db_per_km,
                                   double theta_rad = 0.0);
  static ChannelParams from_loss_db(double loss_db, double alpha_db_per_km,
                                    double theta_rad = 0.0);
  static ChannelParams from_transmittance(double transmittance,
                                          double theta_rad = 0.0);
};

double transmittance_from_length(double length_km, double alpha_db_per_km);

/// Splits the total misalignment error e_d equally over the four channels and
/// returns the rotation angles theta_k = arcsin(sqrt(e_d / 4)).
std::array<double, 4> misalignment_split(double e_d);

/// Weak coherent pulse after loss and misalignment: Poissonian in the total
/// surviving photon number with mean mu * t, each photon split binomially
/// between the two polarization modes of the encoding frame. The first mode
/// of the returned occupations is the encoded one for bit 0.
PhotonNumberDistribution propagate_wcp(double mu, const BB84State& pol,
                                       const ChannelParams& ch, int n_max);

/// An exact single photon after loss and misalignment: survives with the
/// channel transmittance and splits between the two polarization modes like
/// a single weak-pulse photon would.
PhotonNumberDistribution propagate_single_photon(const BB84State& pol,
                                                 const ChannelParams& ch,
                                                 int n_max);

/// Environment record of a lossy transmission: photons lost per polarization
/// mode, per side.
struct LossRecord {
  Occupation david;
  Occupation ethan;
  auto operator<=>(const LossRecord&) const = default;
};

/// Incoherent mixture over loss records; amplitudes within one record stay
/// coherent. Total probability over all components can be below one when the
/// input state was truncated.
struct LossRecordMixture {
  std::map<LossRecord, AmplitudeState> components;
  double total_probability() const;
};

/// Propagates a two-port entangled state through the channels toward David
/// and Ethan: binomial loss amplitudes indexed incoherently by the lost
/// occupations, then the channel rotations applied coherently within each
/// record.
LossRecordMixture propagate_epr(const AmplitudeState& pdc,
                                const ChannelParams& ch_d,
                                const ChannelParams& ch_e, int n_max);

}  // namespace epmdi
