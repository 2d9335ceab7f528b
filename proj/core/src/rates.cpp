#include "epmdi/rates.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace epmdi {

double binary_entropy(double x) {
  if (x < 0.0 || x > 1.0) {
    throw std::invalid_argument("binary_entropy: argument must be in [0, 1]");
  }
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

SiftAction sift_decision(Basis basis, BsmOutcome david, BsmOutcome ethan) {
  if (david == BsmOutcome::fail || ethan == BsmOutcome::fail) {
    return SiftAction::discard;
  }
  if (basis == Basis::z) return SiftAction::flip;
  return david == ethan ? SiftAction::flip : SiftAction::non_flip;
}

double single_single_probability(double mu_a, double mu_b) {
  if (mu_a < 0.0 || mu_b < 0.0) {
    throw std::invalid_argument("single_single_probability: intensities must be >= 0");
  }
  return mu_a * mu_b * std::exp(-(mu_a + mu_b));
}

double secret_key_rate(const RateSummary& summary, double f_e) {
  if (f_e < 1.0) {
    throw std::invalid_argument("secret_key_rate: f_e must be >= 1");
  }
  const double h_e11 = summary.e11_defined ? binary_entropy(summary.e11_x) : 1.0;
  double leak = 0.0;
  if (summary.e_z.has_value()) {
    leak = summary.q_z * f_e * binary_entropy(*summary.e_z);
  }
  return summary.q11_z * (1.0 - h_e11) - leak;
}

namespace {

struct RunMasses {
  double success = 0.0;
  double flip = 0.0;
  double non_flip = 0.0;
};

RunMasses run_masses(const JointOutcomeDistribution& dist, Basis basis) {
  RunMasses rm;
  constexpr std::array<BsmOutcome, 2> bell{BsmOutcome::psi_plus,
                                           BsmOutcome::psi_minus};
  for (BsmOutcome od : bell) {
    for (BsmOutcome oe : bell) {
      const double p = dist.at(od, oe);
      rm.success += p;
      if (sift_decision(basis, od, oe) == SiftAction::flip) {
        rm.flip += p;
      } else {
        rm.non_flip += p;
      }
    }
  }
  return rm;
}

// Encoding pairs averaged for gains: same-state runs first, then orthogonal.
constexpr std::array<std::array<int, 2>, 4> kEncodingPairs{
    {{0, 0}, {1, 1}, {0, 1}, {1, 0}}};

struct BasisMasses {
  double gain = 0.0;   // mean success probability over the four encodings
  double error = 0.0;  // mean error mass
};

BasisMasses accumulate_basis(
    Basis basis,
    const std::function<JointOutcomeDistribution(int, int)>& joint) {
  BasisMasses out;
  for (const auto& bits : kEncodingPairs) {
    const RunMasses rm = run_masses(joint(bits[0], bits[1]), basis);
    out.gain += rm.success;
    if (basis == Basis::z) {
      // Z sifting always flips, so every success on equal encodings is an
      // error and successes on orthogonal encodings are correct.
      if (bits[0] == bits[1]) out.error += rm.success;
    } else {
      out.error += bits[0] == bits[1] ? rm.flip : rm.non_flip;
    }
  }
  out.gain /= kEncodingPairs.size();
  out.error /= kEncodingPairs.size();
  return out;
}

}  // namespace

RateCalculator::RateCalculator(const ScenarioParams& scenario,
                               const OutcomeEngine& engine)
    : scenario_(&scenario), engine_(&engine) {
  rho_ = make_pdc_density(scenario.lambda, scenario.ch_d, scenario.ch_e,
                          scenario.n_max);
}

JointOutcomeDistribution RateCalculator::joint_for(Basis basis, int bit_a,
                                                   int bit_b,
                                                   bool single_photon_sources) const {
  const ScenarioParams& sc = *scenario_;
  const auto alice =
      single_photon_sources
          ? propagate_single_photon({basis, bit_a}, sc.ch_a, sc.n_max)
          : propagate_wcp(sc.mu_a, {basis, bit_a}, sc.ch_a, sc.n_max);
  const auto bob = single_photon_sources
                       ? propagate_single_photon({basis, bit_b}, sc.ch_b, sc.n_max)
                       : propagate_wcp(sc.mu_b, {basis, bit_b}, sc.ch_b, sc.n_max);
  const Frame frame = basis == Basis::z ? Frame::rectilinear : Frame::diagonal;
  return engine_->joint(alice, bob, rho_, frame);
}

GainQber RateCalculator::gains(Basis basis) const {
  const BasisMasses bm = accumulate_basis(basis, [&](int ba, int bb) {
    return joint_for(basis, ba, bb, false);
  });
  GainQber out;
  out.gain = bm.gain;
  if (bm.gain > 0.0) out.qber = bm.error / bm.gain;
  return out;
}

SinglePhotonQuantities RateCalculator::single_photon() const {
  const BasisMasses z = accumulate_basis(Basis::z, [&](int ba, int bb) {
    return joint_for(Basis::z, ba, bb, true);
  });
  const BasisMasses x = accumulate_basis(Basis::x, [&](int ba, int bb) {
    return joint_for(Basis::x, ba, bb, true);
  });
  SinglePhotonQuantities out;
  out.y11_z = z.gain;
  out.y11_x = x.gain;
  if (x.gain > 0.0) {
    out.e11_x = x.error / x.gain;
    out.e11_defined = true;
  }
  out.q11_z = single_single_probability(scenario_->mu_a, scenario_->mu_b) * z.gain;
  return out;
}

RateSummary RateCalculator::summary(double f_e) const {
  RateSummary s;
  const GainQber z = gains(Basis::z);
  const GainQber x = gains(Basis::x);
  const SinglePhotonQuantities sp = single_photon();
  s.q_z = z.gain;
  s.e_z = z.qber;
  s.q_x = x.gain;
  s.e_x = x.qber;
  s.y11_z = sp.y11_z;
  s.y11_x = sp.y11_x;
  s.e11_x = sp.e11_x;
  s.e11_defined = sp.e11_defined;
  s.q11_z = sp.q11_z;
  s.r_raw = secret_key_rate(s, f_e);
  s.r = std::max(0.0, s.r_raw);
  return s;
}

BasisGain basis_gain_for_intensities(const ScenarioParams& scenario, Basis basis,
                                     double mu_a, double mu_b,
                                     const OutcomeEngine& engine,
                                     const PdcDensity& rho) {
  const Frame frame = basis == Basis::z ? Frame::rectilinear : Frame::diagonal;
  const BasisMasses bm = accumulate_basis(basis, [&](int ba, int bb) {
    const auto alice =
        propagate_wcp(mu_a, {basis, ba}, scenario.ch_a, scenario.n_max);
    const auto bob =
        propagate_wcp(mu_b, {basis, bb}, scenario.ch_b, scenario.n_max);
    return engine.joint(alice, bob, rho, frame);
  });
  return {bm.gain, bm.error};
}

GainQber gains_and_qber(const ScenarioParams& scenario, Basis basis) {
  const OutcomeEngine engine(scenario.det, scenario.n_max);
  return RateCalculator(scenario, engine).gains(basis);
}

SinglePhotonQuantities single_photon_quantities(const ScenarioParams& scenario) {
  const OutcomeEngine engine(scenario.det, scenario.n_max);
  return RateCalculator(scenario, engine).single_photon();
}

RateSummary compute_rate_summary(const ScenarioParams& scenario, double f_e,
                                 const OutcomeEngine& engine) {
  return RateCalculator(scenario, engine).summary(f_e);
}

RateSummary compute_rate_summary(const ScenarioParams& scenario, double f_e) {
  const OutcomeEngine engine(scenario.det, scenario.n_max);
  return RateCalculator(scenario, engine).summary(f_e);
}

}  // namespace epmdi
