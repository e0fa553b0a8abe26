#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "couette/spectral.hpp"
#include "couette/weights.hpp"

namespace couette {

enum class ModelKind { NavierStokes, Boussinesq, MhdHorizontal, MhdVertical };

std::string to_string(ModelKind m);
ModelKind model_from_string(const std::string& s);
WeightModel weight_model_of(ModelKind m);

struct ModelSpec {
  ModelKind model = ModelKind::NavierStokes;
  double nu = 1e-3;
  double kappa = 1e-3;
  double beta = 1.0;
  std::array<double, 2> alpha{1.0, 0.0};
  // Drop the quadratic transport terms.
  bool linear = false;

  void validate() const;
  // Number of evolved fields and their component counts.
  std::vector<int> field_components() const;
  // Diffusivity applied to each evolved field.
  std::vector<double> diffusivities() const;
  std::vector<std::string> field_names() const;
};

// NS: {w}; Boussinesq: {w, theta}; MHD: {v, b} (2-component fields).
struct State {
  double t = 0.0;
  std::vector<SpectralField> fields;
};

State make_zero_state(const ModelSpec& spec, const SpectralGrid& grid, double t = 0.0);

// Velocity Delta_t^{-1} grad_t^perp w of a vorticity field.
SpectralField velocity_from_vorticity(const SpectralField& w, double t);

SpectralField ns_rhs(const SpectralField& w, double t, bool linear = false);
std::pair<SpectralField, SpectralField> boussinesq_rhs(const SpectralField& w,
                                                       const SpectralField& theta, double t,
                                                       const ModelSpec& spec);
std::pair<SpectralField, SpectralField> mhd_rhs(const SpectralField& v, const SpectralField& b,
                                                double t, const ModelSpec& spec);

// Right-hand side of the evolved fields without the dissipation.
std::vector<SpectralField> model_rhs(const ModelSpec& spec, const State& state);

// Largest linear-plus-advective frequency, for the CFL rule. Modes whose
// dissipation factor over dt is below 1e-8 are treated as inactive.
double max_frequency(const ModelSpec& spec, const State& state, double dt);

// Restores the div_t = 0 constraint for MHD states; no-op otherwise.
void constrain(const ModelSpec& spec, State& state);

std::pair<SpectralField, SpectralField> adapted_boussinesq(const SpectralField& w,
                                                           const SpectralField& theta, double t,
                                                           double beta);
std::pair<SpectralField, SpectralField> from_adapted_boussinesq(const SpectralField& zeta1,
                                                                const SpectralField& zeta2,
                                                                double t, double beta);
std::pair<SpectralField, SpectralField> adapted_mhd(const SpectralField& v, const SpectralField& b,
                                                    double t, const ModelSpec& spec);

}  // namespace couette
