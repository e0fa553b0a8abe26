#include "couette/echo.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>

#include "couette/errors.hpp"

namespace couette {

namespace {

using boost::math::quadrature::gauss_kronrod;

// Gain per unit eps and unit f_k.
double unit_gain(int k, double eta, double gamma, double mu, EchoWindow window) {
  const double m3 = std::cbrt(mu);
  const double tk = eta / k;
  const double kg = std::pow(static_cast<double>(k), gamma);
  const double p = 0.5 * (1.0 + gamma);
  auto f = [=](double t) { return std::exp(-m3 * t) * t / kg * std::pow(1.0 + (t - tk) * (t - tk), -p); };
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  if (window == EchoWindow::Tiled) {
    lo = 0.5 * (eta / (k + 1) + tk);
    hi = 0.5 * (tk + eta / (k - 1));
  }
  constexpr double tol = 1e-12;
  return gauss_kronrod<double, 31>::integrate(f, lo, tk, 15, tol) +
         gauss_kronrod<double, 31>::integrate(f, tk, hi, 15, tol);
}

void check_step(int k, double eta, double mu) {
  if (k < 2) throw ConfigInvalid("echo steps need k >= 2");
  if (!(eta / k >= 1.0)) throw ConfigInvalid("echo steps need eta / k >= 1");
  if (!(mu > 0.0)) throw ConfigInvalid("echo model needs mu > 0");
}

}  // namespace

std::string to_string(EchoWindow w) { return w == EchoWindow::Tiled ? "tiled" : "full"; }

EchoWindow echo_window_from_string(const std::string& s) {
  if (s == "tiled") return EchoWindow::Tiled;
  if (s == "full") return EchoWindow::Full;
  throw ConfigInvalid("unknown echo window '" + s + "'");
}

double echo_step(double f_k, int k, double eta, double gamma, double mu, double eps,
                 EchoWindow window) {
  check_step(k, eta, mu);
  if (eps == 0.0 || f_k == 0.0) return 0.0;
  return eps * f_k * unit_gain(k, eta, gamma, mu, window);
}

void EchoChainState::validate() const {
  if (k_start < 1) throw ConfigInvalid("k_start must be >= 1");
  if (!(eta >= k_start)) throw ConfigInvalid("need k_start <= eta");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigInvalid("gamma must lie in [0, 1]");
  if (!(gamma_tilde >= 0.0 && gamma_tilde <= gamma)) throw ConfigInvalid("need 0 <= gamma_tilde <= gamma");
  if (!(mu > 0.0)) throw ConfigInvalid("mu must be positive");
  if (!(epsilon >= 0.0)) throw ConfigInvalid("epsilon must be non-negative");
}

EchoChainResult run_chain(const EchoChainState& s) {
  s.validate();
  EchoChainResult out;
  out.amplitudes.assign(s.k_start + 1, 0.0);
  out.amplitudes[s.k_start] = 1.0;
  for (int k = s.k_start; k >= 2; --k) {
    double fk = out.amplitudes[k];
    out.amplitudes[k - 1] = fk + echo_step(fk, k, s.eta, s.gamma, s.mu, s.epsilon, s.window);
  }
  out.amplification = out.amplitudes[1];
  if (!std::isfinite(out.amplification)) {
    out.overflow = true;
    out.amplification = std::numeric_limits<double>::infinity();
  }
  return out;
}

CriticalEpsilon critical_epsilon(double mu, double gamma, double r, double eta, int k_start,
                                 const EchoOptions& o) {
  if (!(o.threshold > 1.0)) throw ConfigInvalid("threshold amplification must exceed 1");
  if (!(o.eps_lo > 0.0 && o.eps_hi > o.eps_lo)) throw ConfigInvalid("invalid eps range");
  EchoChainState s;
  s.eta = eta;
  s.k_start = k_start;
  s.gamma = gamma;
  s.mu = mu;
  s.r = r;
  s.window = o.window;
  s.validate();
  // Gains are linear in eps, so the amplification is prod_k (1 + eps a_k).
  std::vector<double> a;
  for (int k = k_start; k >= 2; --k) a.push_back(unit_gain(k, eta, gamma, mu, o.window));
  auto amp = [&](double eps) {
    double p = 1.0;
    for (double ak : a) p *= 1.0 + eps * ak;
    return p;
  };
  if (amp(o.eps_hi) < o.threshold)
    throw BracketFailure("amplification stays below threshold up to eps = " + std::to_string(o.eps_hi));
  if (amp(o.eps_lo) >= o.threshold)
    throw BracketFailure("amplification already reaches threshold at eps = " + std::to_string(o.eps_lo));
  double lo = o.eps_lo, hi = o.eps_hi;
  while (hi / lo > 1.0 + o.rel_tol) {
    double mid = std::sqrt(lo * hi);
    (amp(mid) >= o.threshold ? hi : lo) = mid;
  }
  CriticalEpsilon c;
  c.eps_star = std::sqrt(lo * hi);
  s.epsilon = c.eps_star;
  c.amplification = run_chain(s).amplification;
  return c;
}

double echo_eta(double mu, double eta_scale) { return eta_scale / std::cbrt(mu); }

std::vector<EchoRecord> run_echo_sweep(const EchoSweep& sw) {
  std::vector<EchoRecord> out;
  for (double g : sw.gammas)
    for (double mu : sw.mu_grid) {
      double eta = echo_eta(mu, sw.eta_scale);
      auto c = critical_epsilon(mu, g, sw.r, eta, sw.k_start, sw.options);
      out.push_back({mu, g, sw.r, eta, sw.k_start, c.eps_star, c.amplification});
    }
  return out;
}

}  // namespace couette
