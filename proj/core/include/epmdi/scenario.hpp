#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "epmdi/channel.hpp"
#include "epmdi/interference.hpp"

namespace epmdi {

/// One fully concrete physical configuration: everything the pipeline needs
/// to produce outcome probabilities.
struct ScenarioParams {
  double mu_a = 0.1;    // Alice's mean photon number
  double mu_b = 0.1;    // Bob's
  double lambda = 5e-4; // pair parameter of the entangled source (mu_c = 2 lambda)
  ChannelParams ch_a;   // Alice -> David
  ChannelParams ch_d;   // source -> David
  ChannelParams ch_e;   // source -> Ethan
  ChannelParams ch_b;   // Bob -> Ethan
  DetectorParams det;
  int n_max = 4;
  double tail_tolerance = 1e-8;

  /// Largest truncation tail among the three sources at these intensities.
  double worst_source_tail() const;
};

enum class RateMode : std::uint8_t { asymptotic, finite_key };
enum class MisalignmentSampling : std::uint8_t { fixed, monte_carlo };

/// Serialized experiment description: the parameters that stay fixed while
/// loss and intensities are swept or optimized.
struct ScenarioConfig {
  DetectorParams det{0.145, 6.02e-6};
  double e_d = 0.03;                // total misalignment error
  double alpha_db_per_km = 0.21;    // fiber attenuation
  double f_e = 1.16;                // error-correction inefficiency
  int n_max = 4;
  double tail_tolerance = 1e-8;
  RateMode mode = RateMode::asymptotic;
  double finite_n_pulses = 1e15;
  double finite_epsilon = 1e-10;
  std::optional<double> decoy_nu1;  // empty: optimizer chooses
  double decoy_nu2 = 0.0;
  MisalignmentSampling sampling = MisalignmentSampling::fixed;
  std::uint64_t mc_seed = 1;
  int mc_draws = 16;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Parse failure with the offending line recorded.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
std::string serialize_config(const ScenarioConfig& config);

/// Validates field ranges; throws ConfigError (line 0) on violations.
void validate_config(const ScenarioConfig& config);

/// Loss placement across the four channels. The total loss splits equally
/// between the Alice-side and Bob-side arms; `split_a` is the fraction of the
/// Alice arm assigned to Alice -> David (the rest sits between the source and
/// David), and likewise `split_b`.
struct LossSplit {
  double split_a = 0.5;
  double split_b = 0.5;
};

/// Concrete scenario for a total system loss, intensities and loss split,
/// with misalignment angles fixed at their per-channel maxima.
ScenarioParams build_scenario(const ScenarioConfig& config, double total_loss_db,
                              double mu_a, double mu_b, double lambda,
                              const LossSplit& split);

/// Same, with explicit misalignment angles (used by the Monte Carlo
/// misalignment mode).
ScenarioParams build_scenario_with_angles(const ScenarioConfig& config,
                                          double total_loss_db, double mu_a,
                                          double mu_b, double lambda,
                                          const LossSplit& split,
                                          const std::array<double, 4>& thetas);

}  // namespace epmdi
