#pragma once

// Adaptive quadrature of the weight definitions, straight from their
// integral forms. Nothing here touches the library's closed forms or tables.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

namespace detail {

template <class F>
double gk(F f, double a, double b) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 10, 1e-12);
}

// Integral over [a, b] split at the interior point c when it lies inside.
template <class F>
double gk_split(F f, double a, double b, double c) {
  if (c > a && c < b) return gk(f, a, c) + gk(f, c, b);
  return gk(f, a, b);
}

}  // namespace detail

inline double bracket_sq(double s) { return std::sqrt(1.0 + s * s); }

inline double g_gamma(double gamma, double r, double c, double s) {
  double b = bracket_sq(s);
  if (gamma > 0.0) return c * std::pow(b, -(1.0 + gamma));
  return c / (b * std::pow(std::log(1.0 + b), 1.0 + r));
}

// Integral of g_gamma over [a, inf), a >= 0. Body in x = ln(1 + s) up to
// s = U, closed-form remainder beyond (relative error O(1/U)).
inline double g_upper_tail(double gamma, double r, double c, double a) {
  const double U = 1e12;
  auto f = [&](double x) { return g_gamma(gamma, r, c, std::expm1(x)) * std::exp(x); };
  double lo = std::log1p(a), hi = std::log1p(U);
  double body = 0.0;
  // Panels of unit length keep the kernel resolved near the origin.
  for (double x = lo; x < hi; x += 1.0) body += detail::gk(f, x, std::min(x + 1.0, hi));
  double rem = gamma > 0.0 ? c * std::pow(U, -gamma) / gamma : c / (r * std::pow(std::log(U), r));
  return body + rem;
}

// int_0^a g_gamma in x = ln(1 + s), unit panels.
inline double g_integral(double gamma, double r, double c, double a) {
  auto f = [&](double x) { return g_gamma(gamma, r, c, std::expm1(x)) * std::exp(x); };
  double hi = std::log1p(a), body = 0.0;
  for (double x = 0.0; x < hi; x += 1.0) body += detail::gk(f, x, std::min(x + 1.0, hi));
  return body;
}

// Half-line mass; depends only on the kernel parameters, so the last one is kept.
inline double g_half_mass(double gamma, double r, double c) {
  static thread_local double key[3] = {-1.0, -1.0, -1.0}, T0 = 0.0;
  if (key[0] != gamma || key[1] != r || key[2] != c) {
    T0 = g_upper_tail(gamma, r, c, 0.0);
    key[0] = gamma, key[1] = r, key[2] = c;
  }
  return T0;
}

// int_{-inf}^s g_gamma = T0 + sign(s) int_0^{|s|} g_gamma with T0 the half-line mass.
inline double g_antiderivative(double gamma, double r, double c, double s) {
  double T0 = g_half_mass(gamma, r, c);
  double part = g_integral(gamma, r, c, std::fabs(s));
  return s < 0.0 ? T0 - part : T0 + part;
}

struct MGamma {
  double m_tilde, m;
};

// ln m_tilde = sum_{0 < |n| <= n_max} <k-n>^{-3} int_{-inf}^t g(tau - eta/n) dtau,
// m = exp(min(1, t mu^{1/3}) ln m_tilde).
inline MGamma m_gamma(double gamma, double r, double c, double mu, int n_max, double t, int k,
                      double eta) {
  const double T0 = g_half_mass(gamma, r, c);
  double E = 0.0;
  for (int n = -n_max; n <= n_max; ++n) {
    if (n == 0) continue;
    double d = k - n, s = t - eta / n;
    double part = g_integral(gamma, r, c, std::fabs(s));
    E += std::pow(1.0 + d * d, -1.5) * (s < 0.0 ? T0 - part : T0 + part);
  }
  double pref = std::min(1.0, t * std::cbrt(mu));
  return {std::exp(E), std::exp(pref * E)};
}

// Quadrature of d_t ln M_mu = c^{-1} mu^{1/3} / (1 + mu^{2/3} (t - eta/k)^2)
// from M_mu(0) = 1; k = 0 uses eta/k -> |eta|.
inline double M_mu(double c, double mu, double t, int k, double eta) {
  double tc = k == 0 ? std::fabs(eta) : eta / k, m13 = std::cbrt(mu);
  auto f = [&](double tau) {
    double s = m13 * (tau - tc);
    return m13 / (c * (1.0 + s * s));
  };
  return std::exp(detail::gk_split(f, 0.0, t, tc));
}

// M_L^theta = exp(2/c int_{-inf}^t 1_{|tau - eta/k| <= W} <eta/k - tau>^{-3})
// with c = (1 - 1/(4 beta)) / 4 and W = 2 mu^{-1/6} / c; k = 0 uses eta/k -> |eta|.
inline double M_L_theta(double beta, double mu, double t, int k, double eta) {
  double ct = (1.0 - 1.0 / (4.0 * beta)) / 4.0;
  double W = 2.0 * std::pow(mu, -1.0 / 6.0) / ct;
  double tc = k == 0 ? std::fabs(eta) : eta / k;
  auto f = [&](double tau) { return std::pow(bracket_sq(tc - tau), -3.0); };
  return std::exp(2.0 / ct * detail::gk_split(f, tc - W, std::min(t, tc + W), tc));
}

// M_{L,d,c1} = exp(c1^{-1} int_{-inf}^t 1 / (1 + (d1 + d2 (tau - eta/k))^2)).
inline double M_alpha(double d1, double d2, double c1, double t, int k, double eta) {
  double tc = k == 0 ? std::fabs(eta) : eta / k;
  // Integrand peaks at tau0; x = t - tau on the half line.
  double tau0 = tc - d1 / d2;
  auto f = [&](double x) {
    double u = d1 + d2 * (t - x - tc);
    return 1.0 / (1.0 + u * u);
  };
  double x0 = t - tau0;
  double X = std::max(0.0, x0) + 64.0 / std::fabs(d2);
  double body = detail::gk_split(f, 0.0, X, x0);
  boost::math::quadrature::exp_sinh<double> es;
  auto g = [&](double y) { return f(X + y); };
  double tail = es.integrate(g, 0.0, std::numeric_limits<double>::infinity(), 1e-14);
  return std::exp((body + tail) / c1);
}

// int_{t0}^{t1} (k^2 + (eta - k tau)^2) dtau.
inline double dissipation_integral(double k, double eta, double t0, double t1) {
  auto f = [&](double tau) { return k * k + (eta - k * tau) * (eta - k * tau); };
  return detail::gk(f, t0, t1);
}

}  // namespace oracle
