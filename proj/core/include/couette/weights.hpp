#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "couette/spectral.hpp"

namespace couette {

// <s> = sqrt(1 + s^2) (Square, default) or sqrt(1 + |s|) (Absolute).
enum class BracketMode { Square, Absolute };

double bracket(double s, BracketMode mode = BracketMode::Square);

struct WeightParams {
  double gamma = 1.0;
  double gamma_tilde = 0.0;
  double r = 1.0;
  double c = 0.1;
  double mu = 1e-3;
  int N = 12;
  BracketMode bracket_mode = BracketMode::Square;
  int n_max = 64;
  // Absolute bound on the reported n-sum tail of ln m_gamma.
  double tail_tolerance = 1e-3;

  double beta = 1.0;
  std::array<double, 2> alpha{1.0, 0.0};
  // Non-positive values select the model defaults c / |alpha_1| and
  // 1 / (10 max(1, |alpha_2|)).
  double c1 = 0.0;
  double c2 = 0.0;
  // Dissipation weights of the MHD composite; non-positive means mu.
  double nu = 0.0;
  double kappa = 0.0;

  // Test switches: disabled factors are identically 1.
  bool use_m_gamma = true;
  bool use_M_L = true;
  bool use_M_mu = true;

  void validate() const;
  double nu_or_mu() const { return nu > 0.0 ? nu : mu; }
  double kappa_or_mu() const { return kappa > 0.0 ? kappa : mu; }
  double c1_or_default() const;
  double c2_or_default() const;
};

// g_gamma together with its tabulated antiderivative.
class ResonanceKernel {
 public:
  ResonanceKernel(double gamma, double r, double c);

  // Shared immutable instance per (gamma, r, c).
  static std::shared_ptr<const ResonanceKernel> shared(double gamma, double r, double c);

  double g(double s) const;
  double dg(double s) const;
  // Integral of g over [a, inf), a >= 0.
  double upper_tail(double a) const;
  // G(s) = integral of g over (-inf, s].
  double antiderivative(double s) const;
  double l1_norm() const { return norm_; }
  double gamma() const { return gamma_; }

 private:
  double tail_formula(double a) const;
  double gamma_, r_, c_;
  double norm_ = 0.0;
  double x_split_ = 1.0, h_uniform_ = 0.0, log_ratio_ = 0.0, x_last_ = 0.0;
  int n_uniform_ = 0;
  std::vector<double> nodes_, tail_, gval_, dgval_;
};

double eval_g(const WeightParams& p, double s);

struct MGammaValue {
  double m_tilde = 1.0;
  double m = 1.0;
  double dlog_m = 0.0;
  double dlog_m_tilde = 0.0;
  // Bound on the omitted |n| > n_max part of ln m_tilde.
  double tail_bound = 0.0;
};

MGammaValue eval_m_gamma(const WeightParams& p, double t, int k, double eta);

struct WeightValue {
  double value = 1.0;
  double dlog = 0.0;
};

// Critical time eta / k of the linear weights; |eta| for the x-average.
double critical_time(int k, double eta);

// M_mu with rate mu (defaults to p.mu).
WeightValue eval_M_mu(const WeightParams& p, double t, int k, double eta,
                      std::optional<double> mu = std::nullopt);
WeightValue eval_M_L_theta(const WeightParams& p, double t, int k, double eta);
// Richardson constant (1 - 1/(4 beta)) / 4 and the sup of M_L^theta.
double richardson_constant(double beta);
double M_L_theta_sup(const WeightParams& p);
WeightValue eval_M_alpha(const WeightParams& p, std::array<double, 2> d, double c1, double t,
                         int k, double eta);

enum class WeightModel { NavierStokes, Boussinesq, MhdHorizontal, MhdVertical };

std::string to_string(WeightModel m);
WeightModel weight_model_from_string(const std::string& s);
double model_gamma(WeightModel m);

struct CompositeWeight {
  MGammaValue m_gamma;
  WeightValue M_mu;  // product of the dissipation weights
  WeightValue M_L;   // linear weight (1 for NS)
  double m = 1.0;
  double A = 1.0;
  double dlog_m = 0.0;
};

CompositeWeight eval_composite(const WeightParams& p, WeightModel model, double t, int k,
                               double eta);
double eval_A(const WeightParams& p, WeightModel model, double t, int k, double eta);

// Multiplier arrays at one time. Modes outside the dealias support carry
// m = 1 and the bare A = <k,eta>^N e^{c mu^{1/3} t 1_{k != 0}}.
struct WeightTable {
  SpectralGrid grid;
  WeightModel model = WeightModel::NavierStokes;
  double t = 0.0;
  std::vector<double> m_gamma, m_tilde, M_mu, M_L, m, A, dlog_m_dt;
  double max_tail_bound = 0.0;

  static WeightTable build(const SpectralGrid& grid, const WeightParams& p, WeightModel model,
                           double t);
};

}  // namespace couette
