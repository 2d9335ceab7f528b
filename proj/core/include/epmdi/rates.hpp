#pragma once

#include <optional>

#include "epmdi/interference.hpp"
#include "epmdi/scenario.hpp"

namespace epmdi {

/// Shannon binary entropy in bits, with H(0) = H(1) = 0.
double binary_entropy(double x);

enum class SiftAction : std::uint8_t { flip, non_flip, discard };

/// Reconciliation rule for one joint Bell-measurement result: in the Z basis
/// every double success flips, in the X basis equal results flip and mixed
/// results do not; any failed relay discards the event.
SiftAction sift_decision(Basis basis, BsmOutcome david, BsmOutcome ethan);

struct GainQber {
  double gain = 0.0;
  std::optional<double> qber;  // empty when the total gain is zero (no signal)
};

struct SinglePhotonQuantities {
  double y11_z = 0.0;
  double y11_x = 0.0;
  double e11_x = 0.5;
  bool e11_defined = false;
  double q11_z = 0.0;
};

struct RateSummary {
  double q_z = 0.0;
  std::optional<double> e_z;
  double q_x = 0.0;
  std::optional<double> e_x;
  double y11_z = 0.0;
  double y11_x = 0.0;
  double e11_x = 0.5;
  bool e11_defined = false;
  double q11_z = 0.0;
  double r_raw = 0.0;  // may be negative
  double r = 0.0;      // clamped at zero
};

/// Probability that both parties emit exactly one photon.
double single_single_probability(double mu_a, double mu_b);

/// R = q11_z [1 - H2(e11_x)] - q_z f_e H2(e_z), unclamped.
double secret_key_rate(const RateSummary& summary, double f_e);

/// Evaluates one scenario with a shared interference engine. Builds the
/// source density once and runs the four encoding pairs per basis.
class RateCalculator {
 public:
  RateCalculator(const ScenarioParams& scenario, const OutcomeEngine& engine);

  GainQber gains(Basis basis) const;
  SinglePhotonQuantities single_photon() const;
  RateSummary summary(double f_e) const;
  const PdcDensity& density() const { return rho_; }

 private:
  JointOutcomeDistribution joint_for(Basis basis, int bit_a, int bit_b,
                                     bool single_photon_sources) const;

  const ScenarioParams* scenario_;
  const OutcomeEngine* engine_;
  PdcDensity rho_;
};

GainQber gains_and_qber(const ScenarioParams& scenario, Basis basis);
SinglePhotonQuantities single_photon_quantities(const ScenarioParams& scenario);

/// Gain and error gain of one basis with source intensities overriding the
/// scenario's (the channels, source density and detectors stay fixed). Used
/// by the decoy-state observable simulation.
struct BasisGain {
  double gain = 0.0;
  double error_gain = 0.0;
};
BasisGain basis_gain_for_intensities(const ScenarioParams& scenario, Basis basis,
                                     double mu_a, double mu_b,
                                     const OutcomeEngine& engine,
                                     const PdcDensity& rho);

RateSummary compute_rate_summary(const ScenarioParams& scenario, double f_e,
                                 const OutcomeEngine& engine);
RateSummary compute_rate_summary(const ScenarioParams& scenario, double f_e);

}  // namespace epmdi
