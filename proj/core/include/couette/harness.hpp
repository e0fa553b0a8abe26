#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "couette/config.hpp"
#include "couette/diagnostics.hpp"
#include "couette/dynamics.hpp"

namespace couette {

enum class Outcome { Stable, Unstable, Inconclusive };

std::string to_string(Outcome o);
Outcome outcome_from_string(const std::string& s);

// Initial state of a run at t = 0.
State make_initial_state(const SimConfig& cfg);

struct SimulationResult {
  EnergySeries series;
  State final_state;
  Outcome outcome = Outcome::Inconclusive;
  // Largest and last E(t) / E(1) over t >= 1.
  double max_ratio = 0.0;
  double final_ratio = 0.0;
  // Decay rate of the first field's non-x-averaged norm, NaN if not fittable.
  double decay_rate = 0.0;
  bool nonfinite = false;
  std::string failure;
  double wall_time = 0.0;
  std::size_t steps = 0;
};

// Outcome from the E(t)/E(1) column of a series.
Outcome classify(const EnergySeries& series, const ClassifierSpec& spec, bool nonfinite,
                 double* max_ratio = nullptr);

SimulationResult run_simulation(const SimConfig& cfg);

struct SweepRecord {
  double mu = 0.0;
  double epsilon = 0.0;
  Outcome outcome = Outcome::Inconclusive;
  double max_ratio = 0.0;
  double final_ratio = 0.0;
  double decay_rate = 0.0;
  double wall_time = 0.0;
  std::uint64_t seed = 0;
};

struct BisectOptions {
  // Initial probe is guess_factor * mu^{1/3}.
  double guess_factor = 0.1;
  double expand = 4.0;
  double eps_min = 1e-8;
  double eps_max = 1e2;
  double rel_tol = 0.1;
  int max_probes = 40;
};

struct BisectResult {
  double mu = 0.0;
  double eps_star = 0.0;
  double eps_stable = 0.0;
  double eps_unstable = 0.0;
  std::vector<SweepRecord> records;
};

// Geometric bisection of the stable / not-stable boundary; inconclusive
// probes count as not stable.
BisectResult bisect_threshold(const SimConfig& tmpl, double mu, const BisectOptions& options = {});

// Bisections over a mu grid on `jobs` worker threads; results keep grid order.
std::vector<BisectResult> sweep(const SimConfig& tmpl, const std::vector<double>& mu_grid,
                                const BisectOptions& options = {}, int jobs = 1);

struct SlopeFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
};

// Least-squares slope of ln eps* against ln mu. With `log_r`, fits
// ln(eps* |ln mu|^{1+r}) instead.
SlopeFit fit_threshold_slope(const std::vector<std::pair<double, double>>& mu_eps,
                             std::optional<double> log_r = std::nullopt);
SlopeFit fit_threshold_slope(const std::vector<BisectResult>& results,
                             std::optional<double> log_r = std::nullopt);

void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_sweep_csv(const std::string& path);
void write_threshold_csv(const std::string& path, const std::vector<BisectResult>& results);

// Energy CSV: t, model, then the series columns.
void write_energy_csv(const std::string& path, const EnergySeries& series);
EnergySeries read_energy_csv(const std::string& path);

void write_manifest(const std::string& path, const SimConfig& cfg, const SimulationResult& result);

std::string library_version();

}  // namespace couette
