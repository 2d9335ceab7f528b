#pragma once

#include <optional>
#include <vector>

#include "epmdi/rates.hpp"

namespace epmdi {

/// Signal intensity plus strictly decreasing decoy intensities. The weakest
/// decoy may be zero (vacuum).
struct IntensitySet {
  double signal = 0.1;
  std::vector<double> decoys{0.01, 0.0};

  void validate() const;
  std::vector<double> all() const;  // {signal, decoys...}
};

struct ObservableCell {
  double q_z = 0.0;
  double q_x = 0.0;
  std::optional<double> e_z;
  std::optional<double> e_x;
  double eq_z = 0.0;  // error gain E_Z * Q_Z
  double eq_x = 0.0;
};

/// Gains and error rates per (Alice intensity, Bob intensity) pair per basis,
/// as a real experiment would record them.
struct ObservableTable {
  std::vector<double> a_intensities;
  std::vector<double> b_intensities;
  std::vector<std::vector<ObservableCell>> cells;  // [a index][b index]

  const ObservableCell& at(std::size_t i, std::size_t j) const {
    return cells.at(i).at(j);
  }
};

/// Runs the full pipeline once per intensity combination. Passing a shared
/// engine avoids rebuilding the interference tables.
ObservableTable simulate_observables(const ScenarioParams& scenario,
                                     const IntensitySet& alice,
                                     const IntensitySet& bob,
                                     const OutcomeEngine* engine = nullptr);

struct SinglePhotonBounds {
  double y11_z_lower = 0.0;
  double y11_x_lower = 0.0;
  double e11_x_upper = 1.0;
  bool clamped = false;     // a negative intermediate was clamped to zero
  bool degenerate = false;  // ill-conditioned intensity set
};

/// Two-decoy analytic bounds on the single-photon yield and error rate from
/// the observable table. Sound for any yields in [0, 1]: the returned lower
/// bound never exceeds the true y11 and the upper bound never undercuts the
/// true e11.
SinglePhotonBounds estimate_single_photon_bounds(const ObservableTable& table);

struct FiniteKeyParams {
  double n_pulses = 1e15;
  double epsilon = 1e-10;
};

struct FiniteKeyResult {
  double rate_raw = 0.0;
  double rate = 0.0;          // clamped at zero
  bool insufficient = false;  // statistics too small for a positive bound
  SinglePhotonBounds bounds;  // deviation-degraded bounds actually used
};

/// Key rate with finite statistics: every estimated observable is widened by
/// a two-sided Hoeffding deviation at confidence 1 - epsilon/27 before the
/// decoy bounds are formed. Converges to the asymptotic two-decoy rate as
/// n_pulses grows.
FiniteKeyResult finite_key_rate(const SinglePhotonBounds& asymptotic,
                                const ObservableTable& table,
                                const FiniteKeyParams& fk, double f_e);

}  // namespace epmdi
