#include "epmdi/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

namespace epmdi {

int scan_thread_count() {
  if (const char* env = std::getenv("EPMDI_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

constexpr double kMuMin = 1e-7;
constexpr double kMuMax = 1.0;
constexpr double kBrightnessMin = 2e-7;
constexpr double kBrightnessMax = 0.2;  // lambda up to 0.1
constexpr double kConvergenceTol = 1e-4;
constexpr int kMaxSweeps = 60;

std::vector<std::array<double, 4>> misalignment_draws(const ScenarioConfig& cfg) {
  if (cfg.sampling == MisalignmentSampling::fixed) {
    return {misalignment_split(cfg.e_d)};
  }
  const double theta_max = misalignment_split(cfg.e_d)[0];
  std::mt19937_64 rng(cfg.mc_seed);
  std::uniform_real_distribution<double> uniform(-theta_max, theta_max);
  std::vector<std::array<double, 4>> draws(std::max(1, cfg.mc_draws));
  for (auto& draw : draws) {
    for (double& theta : draw) theta = uniform(rng);
  }
  return draws;
}

double effective_nu1(const ScenarioConfig& cfg, const OptimizationVariables& v) {
  double nu1 = v.nu1.has_value()
                   ? *v.nu1
                   : (cfg.decoy_nu1.has_value() ? *cfg.decoy_nu1
                                                : std::min(v.mu_a, v.mu_b) / 10.0);
  const double mu_low = std::min(v.mu_a, v.mu_b);
  nu1 = std::min(nu1, 0.9 * mu_low);
  nu1 = std::max(nu1, cfg.decoy_nu2 + std::max(1e-9, cfg.decoy_nu2 * 0.5));
  return nu1;
}

Evaluation evaluate_one(const ScenarioConfig& cfg, double loss,
                        const OptimizationVariables& v,
                        const std::array<double, 4>& thetas,
                        const OutcomeEngine& engine) {
  const ScenarioParams sc = build_scenario_with_angles(
      cfg, loss, v.mu_a, v.mu_b, v.mu_c / 2.0, {v.split_a, v.split_b}, thetas);
  Evaluation ev;
  ev.worst_tail = sc.worst_source_tail();
  if (cfg.mode == RateMode::asymptotic) {
    const RateSummary s = compute_rate_summary(sc, cfg.f_e, engine);
    ev.r_raw = s.r_raw;
    ev.q_z = s.q_z;
    ev.e_z = s.e_z;
    ev.e11_x = s.e11_x;
    return ev;
  }
  const double nu1 = effective_nu1(cfg, v);
  const IntensitySet set_a{v.mu_a, {nu1, cfg.decoy_nu2}};
  const IntensitySet set_b{v.mu_b, {nu1, cfg.decoy_nu2}};
  const ObservableTable table = simulate_observables(sc, set_a, set_b, &engine);
  const SinglePhotonBounds asym = estimate_single_photon_bounds(table);
  const FiniteKeyResult res = finite_key_rate(
      asym, table, {cfg.finite_n_pulses, cfg.finite_epsilon}, cfg.f_e);
  ev.r_raw = res.rate_raw;
  ev.q_z = table.at(0, 0).q_z;
  ev.e_z = table.at(0, 0).e_z;
  ev.e11_x = res.bounds.e11_x_upper;
  return ev;
}

}  // namespace

Evaluation evaluate_variables(const ScenarioConfig& cfg, double total_loss_db,
                              const OptimizationVariables& vars,
                              const OutcomeEngine& engine) {
  OptimizationVariables v = vars;
  if (v.mu_a <= 0.0 || v.mu_b <= 0.0 || v.mu_c <= 0.0) {
    throw std::invalid_argument("evaluate_variables: intensities must be > 0");
  }
  const auto draws = misalignment_draws(cfg);
  Evaluation total;
  double e_z_sum = 0.0;
  int e_z_count = 0;
  for (const auto& thetas : draws) {
    const Evaluation ev = evaluate_one(cfg, total_loss_db, v, thetas, engine);
    total.r_raw += ev.r_raw;
    total.q_z += ev.q_z;
    total.e11_x += ev.e11_x;
    total.worst_tail = std::max(total.worst_tail, ev.worst_tail);
    if (ev.e_z.has_value()) {
      e_z_sum += *ev.e_z;
      ++e_z_count;
    }
  }
  const double n = static_cast<double>(draws.size());
  total.r_raw /= n;
  total.q_z /= n;
  total.e11_x /= n;
  if (e_z_count > 0) total.e_z = e_z_sum / e_z_count;
  return total;
}

namespace {

struct Optimizer {
  const ScenarioConfig& cfg;
  double loss;
  const OutcomeEngine& engine;
  bool optimize_nu1;

  OptimizationVariables best_vars;
  double best_value = -std::numeric_limits<double>::infinity();

  double objective(const OptimizationVariables& v) {
    return evaluate_variables(cfg, loss, v, engine).r_raw;
  }

  void consider(const OptimizationVariables& v) {
    const double value = objective(v);
    if (value > best_value) {
      best_value = value;
      best_vars = v;
    }
  }

  static double clamp_coord(int coord, double x) {
    switch (coord) {
      case 0:
      case 1:
        return std::clamp(x, kMuMin, kMuMax);
      case 2:
        return std::clamp(x, kBrightnessMin, kBrightnessMax);
      case 3:
      case 4:
        return std::clamp(x, 0.0, 1.0);
      default:
        return std::clamp(x, 1e-7, 0.5);
    }
  }

  static double read_coord(const OptimizationVariables& v, int coord) {
    switch (coord) {
      case 0: return v.mu_a;
      case 1: return v.mu_b;
      case 2: return v.mu_c;
      case 3: return v.split_a;
      case 4: return v.split_b;
      default: return v.nu1.value_or(0.0);
    }
  }

  static void write_coord(OptimizationVariables& v, int coord, double x) {
    switch (coord) {
      case 0: v.mu_a = x; break;
      case 1: v.mu_b = x; break;
      case 2: v.mu_c = x; break;
      case 3: v.split_a = x; break;
      case 4: v.split_b = x; break;
      default: v.nu1 = x; break;
    }
  }

  bool try_move(int coord, double x) {
    x = clamp_coord(coord, x);
    if (x == read_coord(best_vars, coord)) return false;
    OptimizationVariables trial = best_vars;
    write_coord(trial, coord, x);
    const double value = objective(trial);
    if (value > best_value) {
      best_value = value;
      best_vars = trial;
      return true;
    }
    return false;
  }

  void refine_multiplicative(int coord) {
    static constexpr double kFactors[] = {3.0, 1.8, 1.3, 1.1, 1.03, 1.01};
    for (double f : kFactors) {
      while (try_move(coord, read_coord(best_vars, coord) * f)) {
      }
      while (try_move(coord, read_coord(best_vars, coord) / f)) {
      }
    }
  }

  void refine_additive(int coord) {
    static constexpr double kSteps[] = {0.2, 0.08, 0.03, 0.01, 0.003};
    for (double s : kSteps) {
      while (try_move(coord, read_coord(best_vars, coord) + s)) {
      }
      while (try_move(coord, read_coord(best_vars, coord) - s)) {
      }
    }
  }

  void descend() {
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      const double before = best_value;
      refine_multiplicative(0);
      refine_multiplicative(1);
      refine_multiplicative(2);
      refine_additive(3);
      refine_additive(4);
      if (optimize_nu1) refine_multiplicative(5);
      const double gain = best_value - before;
      if (gain <= kConvergenceTol * std::max(std::abs(best_value), 1e-300)) break;
    }
  }
};

}  // namespace

CurvePoint optimize_point(const ScenarioConfig& cfg, double total_loss_db,
                          const OutcomeEngine* shared_engine,
                          const OptimizationVariables* warm_start) {
  if (total_loss_db < 0.0) {
    throw std::invalid_argument("optimize_point: loss must be >= 0");
  }
  std::optional<OutcomeEngine> local;
  if (shared_engine == nullptr) {
    local.emplace(cfg.det, cfg.n_max);
    shared_engine = &*local;
  }
  const bool finite = cfg.mode == RateMode::finite_key;
  Optimizer opt{cfg, total_loss_db, *shared_engine,
                finite && !cfg.decoy_nu1.has_value()};

  // Coarse symmetric seed grid; the descent afterwards moves every variable
  // independently.
  std::vector<double> mu_grid, lambda_grid;
  for (int i = 0; i <= 12; ++i) mu_grid.push_back(std::pow(10.0, -6.0 + 0.5 * i));
  for (int i = 0; i <= 10; ++i) lambda_grid.push_back(std::pow(10.0, -6.0 + 0.5 * i));
  static constexpr double kSplitSeeds[] = {0.35, 0.5, 0.65};

  for (double mu : mu_grid) {
    for (double lambda : lambda_grid) {
      for (double split : kSplitSeeds) {
        OptimizationVariables v;
        v.mu_a = mu;
        v.mu_b = mu;
        v.mu_c = 2.0 * lambda;
        v.split_a = split;
        v.split_b = split;
        if (finite) {
          v.nu1 = cfg.decoy_nu1.has_value() ? *cfg.decoy_nu1 : mu / 10.0;
        }
        opt.consider(v);
      }
    }
  }
  if (warm_start != nullptr) opt.consider(*warm_start);

  opt.descend();

  CurvePoint point;
  point.total_loss_db = total_loss_db;
  point.vars = opt.best_vars;
  if (!finite) point.vars.nu1.reset();
  const Evaluation ev =
      evaluate_variables(cfg, total_loss_db, opt.best_vars, *shared_engine);
  point.r_raw = ev.r_raw;
  point.r_optimal = std::max(0.0, ev.r_raw);
  point.q_z = ev.q_z;
  point.e_z = ev.e_z;
  point.e11_x = ev.e11_x;
  point.zero_rate = !(ev.r_raw > 0.0);
  point.tail_warning = ev.worst_tail > cfg.tail_tolerance;
  return point;
}

ScanResult scan_curve(const ScenarioConfig& cfg, double loss_min_db,
                      double loss_max_db, double step_db) {
  if (loss_min_db < 0.0 || loss_max_db < loss_min_db) {
    throw std::invalid_argument("scan_curve: invalid loss range");
  }
  std::size_t count = 1;
  if (loss_max_db > loss_min_db) {
    if (!(step_db > 0.0)) {
      throw std::invalid_argument("scan_curve: step must be > 0 for a non-empty range");
    }
    count = static_cast<std::size_t>(
                std::floor((loss_max_db - loss_min_db) / step_db + 1e-9)) +
            1;
  }

  const OutcomeEngine engine(cfg.det, cfg.n_max);
  std::vector<CurvePoint> points(count);
  std::atomic<std::size_t> next{0};
  const int workers = std::max(1, std::min<int>(scan_thread_count(),
                                                static_cast<int>(count)));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          points[i] = optimize_point(cfg, loss_min_db + step_db * i, &engine);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  ScanResult result;
  result.points = std::move(points);
  for (const CurvePoint& p : result.points) {
    if (p.r_optimal > 0.0) result.cutoff_db = p.total_loss_db;
  }
  return result;
}

}  // namespace epmdi
