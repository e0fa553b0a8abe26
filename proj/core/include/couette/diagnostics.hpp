#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "couette/dynamics.hpp"
#include "couette/weights.hpp"

namespace couette {

// Columnar time series. `columns` excludes the leading t and model columns.
struct EnergySeries {
  std::string model;
  std::vector<std::string> columns;
  std::vector<double> times;
  std::vector<std::vector<double>> rows;

  std::size_t column_index(std::string_view name) const;
  std::vector<double> column(std::string_view name) const;
  double value(std::size_t row, std::string_view name) const;
  // Enforces strictly increasing times and finite entries.
  void append(double t, std::vector<double> row);
  std::size_t size() const { return times.size(); }
};

double energy_boussinesq(const SpectralField& zeta1, const SpectralField& zeta2,
                         const WeightTable& table, double beta);

// sum |A f|^2 over all components of all fields.
double weighted_norm2(const std::vector<SpectralField>& fields, const WeightTable& table);

struct BootstrapIntegrals {
  bool started = false;
  double t_last = 0.0;
  double diss_last = 0.0;
  double weight_last = 0.0;
  // Running integrals of mu |grad_t A f|^2 and |sqrt(dt m / m) A f|^2.
  double boot_diss = 0.0;
  double boot_weight = 0.0;
};

void bootstrap_integrals(BootstrapIntegrals& acc, const std::vector<SpectralField>& fields,
                         double t, const WeightTable& table, double mu);

struct DecayFit {
  double rate = 0.0;
  double stderr_rate = 0.0;
  std::size_t samples = 0;
};

DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& norm);
DecayFit fit_decay_rate(const EnergySeries& series, std::string_view column, double t_lo,
                        double t_hi);

struct TransferOptions {
  std::size_t pair_budget = 20'000'000;
  // Read the multiplier's perpendicular gradient in the lab frame instead of
  // the sheared one.
  bool lab_frame_perp = false;
};

struct TransferDecomposition {
  double R = 0.0, T = 0.0, Rem = 0.0, NLeq = 0.0;
  double total = 0.0;
  double R_resonant = 0.0, R_nonresonant = 0.0;
  double NLeq_R = 0.0, NLeq_T = 0.0;
  std::size_t pairs = 0;
};

enum class FrequencySet { Reaction, Transport, Remainder, Average };

// Set membership of ((k,eta),(l,xi)) on the grid lattice; eta = j * unit.
FrequencySet classify_pair(int k, int j, int l, int i, double eta_unit);

TransferDecomposition transfer_decomposition(const SpectralField& f1, const SpectralField& f2,
                                             const SpectralField& q, double gamma,
                                             double gamma_tilde, const WeightTable& table,
                                             double t, const TransferOptions& options = {});

struct DampingRecord {
  double x_part = 0.0;
  double y_part = 0.0;
  double total = 0.0;
};

DampingRecord damping_norms(const ModelSpec& spec, const State& state);

}  // namespace couette
