#include "couette/weights.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "couette/errors.hpp"

namespace couette {

namespace {

using boost::math::quadrature::gauss;

constexpr double kPi = std::numbers::pi;

// Sum over m in Z of <m>^{-3}.
double bracket3_total() {
  static const double total = [] {
    double s = 1.0;
    const int L = 200000;
    for (int m = L; m >= 1; --m) s += 2.0 * std::pow(1.0 + double(m) * m, -1.5);
    return s + 1.0 / (double(L) * L);
  }();
  return total;
}

// Upper bound for the sum over m > M of <m>^{-3}, any integer M.
double bracket3_tail_bound(int M) {
  if (M >= 0) return 1.0 - M / std::sqrt(1.0 + double(M) * M);
  // Complement of the lower bound on the sum over m >= |M|.
  double Mp = -double(M);
  return bracket3_total() - (1.0 - Mp / std::sqrt(1.0 + Mp * Mp));
}

// Quintic Hermite interpolation on [0, h] in u = x / h.
double quintic_hermite(double u, double h, double f0, double d0, double s0, double f1, double d1,
                       double s1) {
  double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
  double h0 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
  double h1 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
  double h2 = 0.5 * u2 - 1.5 * u3 + 1.5 * u4 - 0.5 * u5;
  double h3 = 0.5 * u3 - u4 + 0.5 * u5;
  double h4 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
  double h5 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
  return f0 * h0 + h * d0 * h1 + h * h * s0 * h2 + h * h * s1 * h3 + h * d1 * h4 + f1 * h5;
}

double square_antiderivative_cubed(double s) { return s / std::sqrt(1.0 + s * s); }

// Antiderivative of (1 + |s|)^{-3/2}.
double absolute_antiderivative_cubed(double s) {
  double a = std::fabs(s);
  return std::copysign(2.0 * (1.0 - 1.0 / std::sqrt(1.0 + a)), s);
}

}  // namespace

double bracket(double s, BracketMode mode) {
  return mode == BracketMode::Square ? std::sqrt(1.0 + s * s) : std::sqrt(1.0 + std::fabs(s));
}

void WeightParams::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigInvalid("gamma must lie in [0, 1]");
  if (!(gamma_tilde >= 0.0 && gamma_tilde <= gamma))
    throw ConfigInvalid("gamma_tilde must lie in [0, gamma]");
  if (!(r > 0.0)) throw ConfigInvalid("r must be positive");
  if (!(c > 0.0)) throw ConfigInvalid("c must be positive");
  if (!(mu > 0.0 && mu <= 0.5)) throw ConfigInvalid("mu must lie in (0, 1/2]");
  if (N < 12) throw ConfigInvalid("N must be at least 12");
  if (n_max < 1) throw ConfigInvalid("n_max must be at least 1");
  if (!(tail_tolerance > 0.0)) throw ConfigInvalid("tail_tolerance must be positive");
}

double WeightParams::c1_or_default() const {
  if (c1 > 0.0) return c1;
  if (alpha[0] == 0.0) throw DegenerateDirection("horizontal linear weight needs alpha_1 != 0");
  return c / std::fabs(alpha[0]);
}

double WeightParams::c2_or_default() const {
  if (c2 > 0.0) return c2;
  return 1.0 / (10.0 * std::max(1.0, std::fabs(alpha[1])));
}

ResonanceKernel::ResonanceKernel(double gamma, double r, double c) : gamma_(gamma), r_(r), c_(c) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigInvalid("gamma must lie in [0, 1]");
  if (gamma == 0.0 && !(r > 0.0)) throw ConfigInvalid("gamma = 0 needs r > 0");

  // Graded grid: uniform on [0, 1], geometric beyond.
  n_uniform_ = 32;
  h_uniform_ = x_split_ / n_uniform_;
  const double ratio = 1.01;
  log_ratio_ = std::log(ratio);
  const int n_geom = static_cast<int>(std::ceil(std::log(1e5) / log_ratio_));
  for (int i = 0; i <= n_uniform_; ++i) nodes_.push_back(i * h_uniform_);
  for (int i = 1; i <= n_geom; ++i) nodes_.push_back(std::exp(i * log_ratio_));
  x_last_ = nodes_.back();

  const std::size_t n = nodes_.size();
  tail_.assign(n, 0.0);
  gval_.resize(n);
  dgval_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    gval_[i] = g(nodes_[i]);
    dgval_[i] = dg(nodes_[i]);
  }
  tail_[n - 1] = tail_formula(x_last_);
  auto gf = [this](double s) { return g(s); };
  for (std::size_t i = n - 1; i-- > 0;)
    tail_[i] = tail_[i + 1] + gauss<double, 10>::integrate(gf, nodes_[i], nodes_[i + 1]);
  norm_ = 2.0 * tail_[0];
}

std::shared_ptr<const ResonanceKernel> ResonanceKernel::shared(double gamma, double r, double c) {
  static std::mutex mutex;
  static std::map<std::tuple<double, double, double>, std::shared_ptr<const ResonanceKernel>> cache;
  // r only matters for gamma = 0.
  auto key = std::make_tuple(gamma, gamma == 0.0 ? r : 0.0, c);
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto k = std::make_shared<const ResonanceKernel>(gamma, r, c);
  cache.emplace(key, k);
  return k;
}

double ResonanceKernel::g(double s) const {
  double b = std::sqrt(1.0 + s * s);
  if (gamma_ > 0.0) return c_ * std::pow(b, -(1.0 + gamma_));
  return c_ / (b * std::pow(std::log1p(b), 1.0 + r_));
}

double ResonanceKernel::dg(double s) const {
  double b2 = 1.0 + s * s;
  if (gamma_ > 0.0) {
    double p = 0.5 * (1.0 + gamma_);
    return -2.0 * p * s * c_ * std::pow(b2, -p - 1.0);
  }
  double b = std::sqrt(b2);
  double L = std::log1p(b);
  double db = s / b;
  return -c_ * db / (b2 * std::pow(L, 1.0 + r_)) * (1.0 + (1.0 + r_) * b / ((1.0 + b) * L));
}

double ResonanceKernel::tail_formula(double a) const {
  if (gamma_ > 0.0) {
    // Binomial series of (1 + s^2)^{-p} in s^{-2}.
    double p = 0.5 * (1.0 + gamma_);
    double coef = 1.0, sum = 0.0, a2inv = 1.0 / (a * a);
    double power = std::pow(a, -gamma_);
    for (int j = 0; j < 12; ++j) {
      sum += coef * power / (gamma_ + 2.0 * j);
      coef *= -(p + j) / (j + 1.0);
      power *= a2inv;
    }
    return c_ * sum;
  }
  // v = ln(1 + <s>) turns g ds into c v^{-(1+r)} (1 - 2 e^{-v})^{-1/2} dv.
  double v0 = std::log1p(std::sqrt(1.0 + a * a));
  auto corr = [this](double v) {
    return std::pow(v, -(1.0 + r_)) * (1.0 / std::sqrt(1.0 - 2.0 * std::exp(-v)) - 1.0);
  };
  double extra = 0.0;
  for (int i = 0; i < 20; ++i) extra += gauss<double, 10>::integrate(corr, v0 + 2.0 * i, v0 + 2.0 * (i + 1));
  return c_ * (std::pow(v0, -r_) / r_ + extra);
}

double ResonanceKernel::upper_tail(double a) const {
  if (a >= x_last_) return tail_formula(a);
  std::size_t i;
  if (a < x_split_) {
    i = static_cast<std::size_t>(a / h_uniform_);
  } else {
    i = n_uniform_ + static_cast<std::size_t>(std::log(a) / log_ratio_);
  }
  i = std::min(i, nodes_.size() - 2);
  while (i > 0 && nodes_[i] > a) --i;
  while (i + 2 < nodes_.size() && nodes_[i + 1] < a) ++i;
  double h = nodes_[i + 1] - nodes_[i];
  double u = (a - nodes_[i]) / h;
  return quintic_hermite(u, h, tail_[i], -gval_[i], -dgval_[i], tail_[i + 1], -gval_[i + 1],
                         -dgval_[i + 1]);
}

double ResonanceKernel::antiderivative(double s) const {
  return s < 0.0 ? upper_tail(-s) : norm_ - upper_tail(s);
}

double eval_g(const WeightParams& p, double s) {
  double b = bracket(s, p.bracket_mode);
  if (p.gamma > 0.0) return p.c * std::pow(b, -(1.0 + p.gamma));
  if (!(p.r > 0.0)) throw ConfigInvalid("gamma = 0 needs r > 0");
  return p.c / (b * std::pow(std::log1p(b), 1.0 + p.r));
}

namespace {

MGammaValue m_gamma_with(const WeightParams& p, double gamma, double t, int k, double eta) {
  if (!(t >= 0.0)) throw ConfigInvalid("m_gamma needs t >= 0");
  if (p.bracket_mode != BracketMode::Square)
    throw ConfigInvalid("g_gamma is not integrable under the sqrt(1+|s|) bracket");
  auto kernel = ResonanceKernel::shared(gamma, p.r, p.c);
  MGammaValue out;
  double E = 0.0, D = 0.0;
  for (int n = -p.n_max; n <= p.n_max; ++n) {
    if (n == 0) continue;
    double d = double(k - n);
    double w = std::pow(1.0 + d * d, -1.5);
    double s = t - eta / n;
    E += w * kernel->antiderivative(s);
    D += w * kernel->g(s);
  }
  out.tail_bound = kernel->l1_norm() *
                   (bracket3_tail_bound(p.n_max - k) + bracket3_tail_bound(p.n_max + k));
  if (out.tail_bound > p.tail_tolerance)
    throw TruncationBudgetExceeded("n-sum tail bound " + std::to_string(out.tail_bound) +
                                   " exceeds tolerance; raise n_max");
  double mu13 = std::cbrt(p.mu);
  double pref = std::min(1.0, t * mu13);
  out.m_tilde = std::exp(E);
  out.m = std::exp(pref * E);
  out.dlog_m_tilde = D;
  out.dlog_m = (t * mu13 < 1.0 ? mu13 * E : 0.0) + pref * D;
  return out;
}

}  // namespace

double critical_time(int k, double eta) { return k == 0 ? std::fabs(eta) : eta / k; }

MGammaValue eval_m_gamma(const WeightParams& p, double t, int k, double eta) {
  return m_gamma_with(p, p.gamma, t, k, eta);
}

WeightValue eval_M_mu(const WeightParams& p, double t, int k, double eta, std::optional<double> mu) {
  if (!(t >= 0.0)) throw ConfigInvalid("M_mu needs t >= 0");
  double rate = mu.value_or(p.mu);
  double mu13 = std::cbrt(rate);
  double tk = critical_time(k, eta);
  double s = t - tk;
  WeightValue out;
  // Same rounding in both arguments keeps ln M >= 0 exactly.
  double lnM = (std::atan(mu13 * s) + std::atan(mu13 * tk)) / p.c;
  out.value = std::exp(lnM);
  out.dlog = mu13 / (p.c * (1.0 + mu13 * mu13 * s * s));
  return out;
}

double richardson_constant(double beta) {
  if (!(beta > 0.5)) throw InvalidRichardson("beta must exceed 1/2");
  return (1.0 - 1.0 / (4.0 * beta)) / 4.0;
}

double M_L_theta_sup(const WeightParams& p) {
  double ct = richardson_constant(p.beta);
  double W = 2.0 * std::pow(p.mu, -1.0 / 6.0) / ct;
  double S = p.bracket_mode == BracketMode::Square ? square_antiderivative_cubed(W)
                                                   : absolute_antiderivative_cubed(W);
  return std::exp(4.0 * S / ct);
}

WeightValue eval_M_L_theta(const WeightParams& p, double t, int k, double eta) {
  if (!(t >= 0.0)) throw ConfigInvalid("M_L^theta needs t >= 0");
  double ct = richardson_constant(p.beta);
  double W = 2.0 * std::pow(p.mu, -1.0 / 6.0) / ct;
  double s = t - critical_time(k, eta);
  auto S = p.bracket_mode == BracketMode::Square ? square_antiderivative_cubed
                                                  : absolute_antiderivative_cubed;
  WeightValue out;
  if (s <= -W) return out;
  out.value = std::exp(2.0 / ct * (S(std::min(s, W)) - S(-W)));
  if (std::fabs(s) <= W) out.dlog = 2.0 / ct * std::pow(bracket(s, p.bracket_mode), -3.0);
  return out;
}

WeightValue eval_M_alpha(const WeightParams& /*p*/, std::array<double, 2> d, double c1, double t,
                         int k, double eta) {
  if (d[1] == 0.0) throw DegenerateDirection("linear weight direction needs d_2 != 0");
  if (!(c1 > 0.0)) throw ConfigInvalid("linear weight constant must be positive");
  if (!(t >= 0.0)) throw ConfigInvalid("linear weight needs t >= 0");
  double u = d[0] + d[1] * (t - critical_time(k, eta));
  WeightValue out;
  out.value = std::exp((0.5 * kPi + std::copysign(1.0, d[1]) * std::atan(u)) / (c1 * std::fabs(d[1])));
  out.dlog = 1.0 / (c1 * (1.0 + u * u));
  return out;
}

std::string to_string(WeightModel m) {
  switch (m) {
    case WeightModel::NavierStokes: return "ns";
    case WeightModel::Boussinesq: return "boussinesq";
    case WeightModel::MhdHorizontal: return "mhd_horizontal";
    case WeightModel::MhdVertical: return "mhd_vertical";
  }
  return "unknown";
}

WeightModel weight_model_from_string(const std::string& s) {
  if (s == "ns") return WeightModel::NavierStokes;
  if (s == "boussinesq") return WeightModel::Boussinesq;
  if (s == "mhd_horizontal") return WeightModel::MhdHorizontal;
  if (s == "mhd_vertical") return WeightModel::MhdVertical;
  throw ConfigInvalid("unknown model '" + s + "'");
}

double model_gamma(WeightModel m) {
  switch (m) {
    case WeightModel::NavierStokes: return 1.0;
    case WeightModel::Boussinesq: return 0.5;
    case WeightModel::MhdHorizontal:
    case WeightModel::MhdVertical: return 0.0;
  }
  return 1.0;
}

CompositeWeight eval_composite(const WeightParams& p, WeightModel model, double t, int k,
                               double eta) {
  CompositeWeight out;
  if (p.use_m_gamma) out.m_gamma = m_gamma_with(p, model_gamma(model), t, k, eta);

  auto mul = [](WeightValue& acc, WeightValue f) {
    acc.value *= f.value;
    acc.dlog += f.dlog;
  };
  if (p.use_M_mu) {
    if (model == WeightModel::MhdHorizontal || model == WeightModel::MhdVertical) {
      mul(out.M_mu, eval_M_mu(p, t, k, eta, p.nu_or_mu()));
      mul(out.M_mu, eval_M_mu(p, t, k, eta, p.kappa_or_mu()));
    } else {
      mul(out.M_mu, eval_M_mu(p, t, k, eta));
    }
  }
  if (p.use_M_L) {
    switch (model) {
      case WeightModel::NavierStokes: break;
      case WeightModel::Boussinesq: mul(out.M_L, eval_M_L_theta(p, t, k, eta)); break;
      case WeightModel::MhdHorizontal:
        mul(out.M_L, eval_M_alpha(p, {0.0, 1.0}, p.c1_or_default(), t, k, eta));
        break;
      case WeightModel::MhdVertical: {
        double c2 = p.c2_or_default();
        mul(out.M_L, eval_M_alpha(p, p.alpha, c2, t, k, eta));
        mul(out.M_L, eval_M_alpha(p, {0.0, 1.0}, c2, t, k, eta));
        break;
      }
    }
  }
  out.m = out.m_gamma.m * out.M_L.value * out.M_mu.value;
  out.dlog_m = out.m_gamma.dlog_m + out.M_L.dlog + out.M_mu.dlog;
  double brk = bracket(std::hypot(double(k), eta), p.bracket_mode);
  double growth = k != 0 ? std::exp(p.c * std::cbrt(p.mu) * t) : 1.0;
  out.A = std::pow(brk, p.N) * growth / out.m;
  return out;
}

double eval_A(const WeightParams& p, WeightModel model, double t, int k, double eta) {
  return eval_composite(p, model, t, k, eta).A;
}

WeightTable WeightTable::build(const SpectralGrid& grid, const WeightParams& p, WeightModel model,
                               double t) {
  WeightTable tab;
  tab.grid = grid;
  tab.model = model;
  tab.t = t;
  std::size_t n = grid.size();
  tab.m_gamma.assign(n, 1.0);
  tab.m_tilde.assign(n, 1.0);
  tab.M_mu.assign(n, 1.0);
  tab.M_L.assign(n, 1.0);
  tab.m.assign(n, 1.0);
  tab.A.resize(n);
  tab.dlog_m_dt.assign(n, 0.0);
  double growth = std::exp(p.c * std::cbrt(p.mu) * t);
  for (std::size_t i = 0; i < n; ++i) {
    int k = grid.k_at(i);
    double eta = grid.eta_at(i);
    if (!grid.retained(i)) {
      tab.A[i] = std::pow(bracket(std::hypot(double(k), eta), p.bracket_mode), p.N) *
                 (k != 0 ? growth : 1.0);
      continue;
    }
    // The weights are even under (k, eta) -> (-k, -eta).
    std::size_t ci = grid.conjugate_index(i);
    if (ci < i && grid.retained(ci)) {
      tab.m_gamma[i] = tab.m_gamma[ci];
      tab.m_tilde[i] = tab.m_tilde[ci];
      tab.M_mu[i] = tab.M_mu[ci];
      tab.M_L[i] = tab.M_L[ci];
      tab.m[i] = tab.m[ci];
      tab.A[i] = tab.A[ci];
      tab.dlog_m_dt[i] = tab.dlog_m_dt[ci];
      continue;
    }
    auto w = eval_composite(p, model, t, k, eta);
    tab.m_gamma[i] = w.m_gamma.m;
    tab.m_tilde[i] = w.m_gamma.m_tilde;
    tab.M_mu[i] = w.M_mu.value;
    tab.M_L[i] = w.M_L.value;
    tab.m[i] = w.m;
    tab.A[i] = w.A;
    tab.dlog_m_dt[i] = w.dlog_m;
    tab.max_tail_bound = std::max(tab.max_tail_bound, w.m_gamma.tail_bound);
  }
  return tab;
}

}  // namespace couette
