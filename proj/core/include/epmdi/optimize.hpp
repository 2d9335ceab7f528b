#pragma once

#include <optional>
#include <vector>

#include "epmdi/decoy.hpp"
#include "epmdi/rates.hpp"
#include "epmdi/scenario.hpp"

namespace epmdi {

struct OptimizationVariables {
  double mu_a = 0.1;
  double mu_b = 0.1;
  double mu_c = 1e-3;  // source brightness (= 2 lambda)
  double split_a = 0.5;
  double split_b = 0.5;
  std::optional<double> nu1;  // decoy intensity, finite mode only
};

struct CurvePoint {
  double total_loss_db = 0.0;
  double r_optimal = 0.0;  // clamped at zero
  double r_raw = 0.0;
  OptimizationVariables vars;
  double q_z = 0.0;
  std::optional<double> e_z;
  double e11_x = 0.0;        // single-photon X error (bound in finite mode)
  bool zero_rate = false;    // no positive rate at this loss
  bool tail_warning = false; // source truncation tail above tolerance at the optimum
};

struct ScanResult {
  std::vector<CurvePoint> points;
  std::optional<double> cutoff_db;  // largest loss with a positive rate
};

/// Diagnostics of one objective evaluation.
struct Evaluation {
  double r_raw = 0.0;
  double q_z = 0.0;
  std::optional<double> e_z;
  double e11_x = 0.0;
  double worst_tail = 0.0;
};

/// Evaluates the configured rate (asymptotic or finite-key, with the
/// configured misalignment sampling) at explicit variables.
Evaluation evaluate_variables(const ScenarioConfig& config, double total_loss_db,
                              const OptimizationVariables& vars,
                              const OutcomeEngine& engine);

/// Maximizes the key rate over intensities and loss splits at one total
/// loss: coarse logarithmic grid, then coordinate descent until the relative
/// improvement drops below 1e-4.
CurvePoint optimize_point(const ScenarioConfig& config, double total_loss_db,
                          const OutcomeEngine* shared_engine = nullptr,
                          const OptimizationVariables* warm_start = nullptr);

/// Independent optimize_point per loss value, evaluated concurrently.
ScanResult scan_curve(const ScenarioConfig& config, double loss_min_db,
                      double loss_max_db, double step_db);

/// Worker count for scans: EPMDI_THREADS when set, hardware concurrency
/// otherwise.
int scan_thread_count();

}  // namespace epmdi
