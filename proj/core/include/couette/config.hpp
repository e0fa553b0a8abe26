#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "couette/dynamics.hpp"
#include "couette/spectral.hpp"
#include "couette/stepper.hpp"
#include "couette/weights.hpp"

namespace couette {

struct GridSpec {
  int nx = 64;
  int ny = 256;
  double ly = 4.0 * std::numbers::pi;
  double dealias_fraction = 2.0 / 3.0;

  SpectralGrid make() const { return SpectralGrid(nx, ny, ly, dealias_fraction); }
};

enum class InitialProfile { Random, SingleMode, EchoPair };

std::string to_string(InitialProfile p);
InitialProfile initial_profile_from_string(const std::string& s);

struct InitialSpec {
  InitialProfile profile = InitialProfile::Random;
  // H^N norm of the random profile; amplitude of each seeded mode otherwise.
  double epsilon = 1e-3;
  std::uint64_t seed = 1;
  // Random profile support |k| <= band_k, |j| <= band_j.
  int band_k = 4;
  int band_j = 8;
  // Seeded modes (eta = j * 2 pi / ly); echo_pair uses both.
  int k = 1, j = 0;
  int k2 = -1, j2 = 4;
};

struct DiagnosticsSpec {
  double cadence = 1.0;
  bool transfer = false;
  std::size_t transfer_pair_budget = 20'000'000;
  bool transfer_lab_frame_perp = false;
  // Decay fits start at transient_fraction * mu^{-1/3}.
  double transient_fraction = 0.4;
};

struct ClassifierSpec {
  double g_stable = 4.0;
  double g_unstable = 100.0;
  double t_mult = 5.0;
};

struct OutputSpec {
  std::string energy_csv;
  std::string manifest;
};

struct SimConfig {
  ModelSpec model;
  GridSpec grid;
  WeightParams weights;
  StepperConfig stepper;
  // Unset: t_end = t_mult * mu^{-1/3}.
  std::optional<double> t_end;
  InitialSpec initial;
  DiagnosticsSpec diagnostics;
  ClassifierSpec classifier;
  OutputSpec output;

  // Dissipation rate driving the weights and the run length.
  double mu() const;
  double resolved_t_end() const;
  // Copies model parameters into the weights and, unless `keep_gamma`,
  // installs the model's (gamma, gamma_tilde).
  void sync_weights(bool keep_gamma);
  void validate() const;
  // Sets nu = kappa = mu and the matching weight rate.
  void set_mu(double mu);
};

// Parses a JSON document. Unknown keys raise ConfigInvalid.
SimConfig parse_config(const std::string& json_text);
SimConfig load_config(const std::string& path);
// Canonical JSON of the fully-resolved configuration.
std::string to_json(const SimConfig& cfg);
// FNV-1a 64 hash of to_json(cfg), as 16 hex digits.
std::string config_hash(const SimConfig& cfg);

}  // namespace couette
