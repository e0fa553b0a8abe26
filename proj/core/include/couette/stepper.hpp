#pragma once

#include <functional>
#include <string>
#include <vector>

#include "couette/dynamics.hpp"

namespace couette {

enum class Scheme { IFRK4, IFRK2 };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct StepperConfig {
  double dt = 0.05;
  Scheme scheme = Scheme::IFRK4;
  double t_end = 10.0;
  double cfl_safety = 0.4;
  // Shrink dt to satisfy the CFL rule instead of raising CflViolation.
  bool adapt = true;
  // Smallest step adapt may take.
  double dt_min = 1e-6;

  void validate() const;
};

// Exact decay of exp(mu * int_{t0}^{t1} Delta_t) for one mode.
double dissipation_factor(double k, double eta, double t0, double t1, double mu);

using RhsFunction = std::function<std::vector<SpectralField>(const State&)>;

struct StepResult {
  State state;
  double dt_used = 0.0;
};

// One integrating-factor RK step of size h from state.t. `diffusivity[i]`
// applies to state.fields[i].
State step_ifrk(const State& state, const RhsFunction& rhs, const std::vector<double>& diffusivity,
                double h, Scheme scheme);

// CFL-checked step for a model: dt from cfg, clipped to `dt_cap` (e.g. to
// land on a diagnostic time). Applies the MHD constraint afterwards.
StepResult step(const State& state, const ModelSpec& spec, const StepperConfig& cfg,
                double dt_cap = 0.0);

// Stability bound of the explicit part along the imaginary axis.
double stability_limit(Scheme s);

}  // namespace couette
