#pragma once

#include <string>
#include <vector>

namespace couette {

// Integration window of one resonant interaction around t_k = eta / k.
//   Tiled: [mid(t_{k+1}, t_k), mid(t_k, t_{k-1})], arithmetic midpoints.
//   Full:  [0, inf).
enum class EchoWindow { Tiled, Full };

std::string to_string(EchoWindow w);
EchoWindow echo_window_from_string(const std::string& s);

// Additive gain to f(k-1) from integrating
//   eps e^{-mu^{1/3} t} (t / k^gamma) <t - eta/k>^{-(1+gamma)} f_k
// over the window with f_k frozen. Requires k >= 2 and eta / k >= 1.
double echo_step(double f_k, int k, double eta, double gamma, double mu, double eps,
                 EchoWindow window = EchoWindow::Tiled);

struct EchoChainState {
  double eta = 10.0;
  int k_start = 3;
  double gamma = 1.0;
  double gamma_tilde = 0.0;
  double mu = 1e-3;
  double epsilon = 0.0;
  double r = 1.0;
  EchoWindow window = EchoWindow::Tiled;
  // amplitudes[k] for k = 0..k_start; filled by run_chain.
  std::vector<double> amplitudes;

  void validate() const;
};

struct EchoChainResult {
  double amplification = 1.0;
  bool overflow = false;
  std::vector<double> amplitudes;
};

// Walks k_start -> 1. Each mode k-1 starts from the carried amplitude f(k)
// and adds its resonant gain, so the amplification is 1 at eps = 0.
EchoChainResult run_chain(const EchoChainState& state);

struct EchoOptions {
  EchoWindow window = EchoWindow::Tiled;
  double threshold = 2.0;
  double eps_lo = 1e-12;
  double eps_hi = 1e6;
  double rel_tol = 1e-3;
};

struct CriticalEpsilon {
  double eps_star = 0.0;
  double amplification = 0.0;
};

CriticalEpsilon critical_epsilon(double mu, double gamma, double r, double eta, int k_start,
                                 const EchoOptions& options = {});

// eta = scale * mu^{-1/3}: keeps the resonant times on the dissipation scale.
double echo_eta(double mu, double eta_scale);

struct EchoRecord {
  double mu, gamma, r, eta;
  int k_start;
  double eps_star, amplification;
};

struct EchoSweep {
  std::vector<double> mu_grid{1e-6, 1e-5, 1e-4, 1e-3, 1e-2};
  std::vector<double> gammas{1.0, 0.5, 0.0};
  double r = 1.0;
  double eta_scale = 16.0;
  int k_start = 3;
  EchoOptions options;
};

std::vector<EchoRecord> run_echo_sweep(const EchoSweep& sweep);

}  // namespace couette
