#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "epmdi/channel.hpp"
#include "epmdi/fock.hpp"

namespace epmdi {

struct ScenarioParams;  // defined in epmdi/scenario.hpp

/// 50:50 beam splitter convention. Any (t, r) with |t|^2 + |r|^2 = 1 and
/// r* t + r t* = 0 gives identical outcome statistics.
struct BeamSplitterSpec {
  Complex t{0.0, 0.0};
  Complex r{0.0, 0.0};

  static BeamSplitterSpec balanced();
  bool valid(double tol = 1e-12) const;
};

struct DetectorParams {
  double eta_d = 1.0;  // efficiency
  double y0 = 0.0;     // dark-count probability per gate
};

enum class BsmOutcome : std::uint8_t { psi_plus = 0, psi_minus = 1, fail = 2 };

/// Probabilities of the nine joint (David, Ethan) Bell-measurement outcomes.
struct JointOutcomeDistribution {
  std::array<std::array<double, 3>, 3> p{};

  double& at(BsmOutcome david, BsmOutcome ethan) {
    return p[static_cast<int>(david)][static_cast<int>(ethan)];
  }
  double at(BsmOutcome david, BsmOutcome ethan) const {
    return p[static_cast<int>(david)][static_cast<int>(ethan)];
  }
  double sum() const;
  /// Mass of events where both relays report a Bell state.
  double success() const;
};

/// Amplitudes of z photons leaving port 3 when |n1> and |n2> interfere at the
/// beam splitter (port 4 holds n1+n2-z). Index of the returned vector is z.
std::vector<Complex> beam_splitter_output(int n1, int n2,
                                          const BeamSplitterSpec& bs);

/// Interference of two single-port states (each with an (h, v) polarization
/// pair) at one relay's beam splitter. Polarizations interfere independently;
/// the result is a coherent state over the ports "port3" and "port4".
AmplitudeState interfere_mode_pair(const AmplitudeState& in1,
                                   const AmplitudeState& in2,
                                   const BeamSplitterSpec& bs);

/// Threshold detection of a two-port rail state behind the polarizing beam
/// splitters: returns {P(psi_plus), P(psi_minus), P(fail)}. psi_minus is the
/// cross pair {3H,4V} or {3V,4H}, psi_plus the same-port pair {3H,3V} or
/// {4H,4V}; every other click pattern fails.
std::array<double, 3> bsm_outcome_probabilities(const AmplitudeState& rails,
                                                const DetectorParams& det);

/// Whether the working polarization frame coincides with the frame of the
/// polarizing beam splitters (rectilinear) or is rotated 45 degrees from it
/// (diagonal). In the diagonal frame the rails are rotated back before
/// detection.
enum class Frame : std::uint8_t { rectilinear, diagonal };

/// Density elements of the entangled source after transmission, restricted to
/// the blocks that can influence threshold detection (equal photon totals on
/// each side between ket and bra).
struct PdcDensity {
  struct Entry {
    Occupation sd, se;    // ket occupations (David side, Ethan side)
    Occupation sdp, sep;  // bra occupations
    Complex w;
  };
  std::vector<Entry> entries;
  double mass = 0.0;  // trace; below one when the source was truncated
};

PdcDensity make_pdc_density(const LossRecordMixture& mixture);

/// Same density straight from the source and channel parameters, skipping the
/// map-based intermediate representation. Agrees with
/// make_pdc_density(propagate_epr(pdc_state(lambda, n_max), ch_d, ch_e, n_max)).
PdcDensity make_pdc_density(double lambda, const ChannelParams& ch_d,
                            const ChannelParams& ch_e, int n_max);

/// Precomputed interference and detection tables for one detector setting.
/// Construction is the expensive part; joint() evaluations afterwards are
/// cheap and the object is safe to share read-only across threads.
class OutcomeEngine {
 public:
  OutcomeEngine(const DetectorParams& det, int n_max,
                const BeamSplitterSpec& bs = BeamSplitterSpec::balanced());
  ~OutcomeEngine();
  OutcomeEngine(OutcomeEngine&&) noexcept;
  OutcomeEngine& operator=(OutcomeEngine&&) noexcept;

  /// Joint outcome distribution for one encoding run. `alice` and `bob` are
  /// the post-channel photon-number distributions entering the relays;
  /// `rho` couples the two relays through the entangled source. Probability
  /// mass lost to source truncation lands on (fail, fail).
  JointOutcomeDistribution joint(const PhotonNumberDistribution& alice,
                                 const PhotonNumberDistribution& bob,
                                 const PdcDensity& rho, Frame frame) const;

  const DetectorParams& detector() const;
  int n_max() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Full pipeline for one encoding pair: sources through channels, both
/// relays, threshold detection. Builds a fresh engine; reuse an OutcomeEngine
/// directly when evaluating many configurations.
JointOutcomeDistribution joint_outcomes(const ScenarioParams& scenario,
                                        Basis basis, int bit_a, int bit_b);

}  // namespace epmdi
