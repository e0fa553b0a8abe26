#include "couette/stepper.hpp"

#include <cmath>
#include <numbers>

#include "couette/errors.hpp"

namespace couette {

namespace {

std::vector<double> factors(const SpectralGrid& g, double t0, double t1, double mu) {
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] = dissipation_factor(g.k_at(i), g.eta_at(i), t0, t1, mu);
  return out;
}

// out = E * a
void scale_into(SpectralField& out, const std::vector<double>& E, const SpectralField& a) {
  const std::size_t n = a.modes();
  for (int c = 0; c < a.components(); ++c)
    for (std::size_t i = 0; i < n; ++i) out.at(c, i) = E[i] * a.at(c, i);
}

void add_scaled(SpectralField& out, const std::vector<double>& E, double s, const SpectralField& a) {
  const std::size_t n = a.modes();
  for (int c = 0; c < a.components(); ++c)
    for (std::size_t i = 0; i < n; ++i) out.at(c, i) += s * E[i] * a.at(c, i);
}

void ensure_finite(const State& s) {
  for (const auto& f : s.fields)
    if (!f.all_finite()) throw NonfiniteState("non-finite coefficient at t = " + std::to_string(s.t));
}

}  // namespace

std::string to_string(Scheme s) { return s == Scheme::IFRK4 ? "ifrk4" : "ifrk2"; }

Scheme scheme_from_string(const std::string& s) {
  if (s == "ifrk4") return Scheme::IFRK4;
  if (s == "ifrk2") return Scheme::IFRK2;
  throw ConfigInvalid("unknown scheme '" + s + "'");
}

void StepperConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigInvalid("dt must be positive");
  if (!(t_end > 0.0)) throw ConfigInvalid("t_end must be positive");
  if (!(cfl_safety > 0.0 && cfl_safety < 1.0)) throw ConfigInvalid("cfl_safety must lie in (0, 1)");
  if (!(dt_min > 0.0 && dt_min <= dt)) throw ConfigInvalid("dt_min must lie in (0, dt]");
}

double dissipation_factor(double k, double eta, double t0, double t1, double mu) {
  // (q0^3 - q1^3) / (3k) with q1 = q0 - k dt, written without the division.
  double q0 = eta - k * t0, q1 = eta - k * t1;
  double dt = t1 - t0;
  double integral = dt * (k * k + (q0 * q0 + q0 * q1 + q1 * q1) / 3.0);
  return std::exp(-mu * integral);
}

double stability_limit(Scheme s) { return s == Scheme::IFRK4 ? 2.0 * std::numbers::sqrt2 : 1.0; }

State step_ifrk(const State& u0, const RhsFunction& rhs, const std::vector<double>& diffusivity,
                double h, Scheme scheme) {
  const std::size_t nf = u0.fields.size();
  const double t0 = u0.t, t1 = u0.t + h, th = u0.t + 0.5 * h;
  std::vector<std::vector<double>> e01(nf), e0h(nf), eh1(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& g = u0.fields[f].grid();
    e01[f] = factors(g, t0, t1, diffusivity.at(f));
    if (scheme == Scheme::IFRK4) {
      e0h[f] = factors(g, t0, th, diffusivity[f]);
      eh1[f] = factors(g, th, t1, diffusivity[f]);
    }
  }

  State out = u0;
  out.t = t1;
  auto k1 = rhs(u0);
  if (scheme == Scheme::IFRK2) {
    State ua = u0;
    ua.t = t1;
    for (std::size_t f = 0; f < nf; ++f) {
      SpectralField tmp = u0.fields[f];
      tmp.axpy(h, k1[f]);
      scale_into(ua.fields[f], e01[f], tmp);
    }
    auto k2 = rhs(ua);
    for (std::size_t f = 0; f < nf; ++f) {
      scale_into(out.fields[f], e01[f], u0.fields[f]);
      add_scaled(out.fields[f], e01[f], 0.5 * h, k1[f]);
      out.fields[f].axpy(0.5 * h, k2[f]);
    }
    return out;
  }

  State ua = u0, ub = u0, uc = u0;
  ua.t = ub.t = th;
  uc.t = t1;
  for (std::size_t f = 0; f < nf; ++f) {
    SpectralField tmp = u0.fields[f];
    tmp.axpy(0.5 * h, k1[f]);
    scale_into(ua.fields[f], e0h[f], tmp);
  }
  auto k2 = rhs(ua);
  for (std::size_t f = 0; f < nf; ++f) {
    scale_into(ub.fields[f], e0h[f], u0.fields[f]);
    ub.fields[f].axpy(0.5 * h, k2[f]);
  }
  auto k3 = rhs(ub);
  for (std::size_t f = 0; f < nf; ++f) {
    scale_into(uc.fields[f], e01[f], u0.fields[f]);
    add_scaled(uc.fields[f], eh1[f], h, k3[f]);
  }
  auto k4 = rhs(uc);
  for (std::size_t f = 0; f < nf; ++f) {
    auto& o = out.fields[f];
    scale_into(o, e01[f], u0.fields[f]);
    add_scaled(o, e01[f], h / 6.0, k1[f]);
    add_scaled(o, eh1[f], h / 3.0, k2[f]);
    add_scaled(o, eh1[f], h / 3.0, k3[f]);
    o.axpy(h / 6.0, k4[f]);
  }
  return out;
}

StepResult step(const State& state, const ModelSpec& spec, const StepperConfig& cfg, double dt_cap) {
  ensure_finite(state);
  double h = cfg.dt;
  double rate = max_frequency(spec, state, h);
  double limit = cfg.cfl_safety * stability_limit(cfg.scheme);
  if (rate * h > limit) {
    if (!cfg.adapt)
      throw CflViolation("dt * frequency = " + std::to_string(rate * h) + " exceeds " +
                         std::to_string(limit));
    h = limit / rate;
    if (h < cfg.dt_min) throw CflViolation("required step below dt_min");
  }
  if (dt_cap > 0.0 && dt_cap < h) h = dt_cap;
  RhsFunction rhs = [&spec](const State& s) {
    ensure_finite(s);
    return model_rhs(spec, s);
  };
  StepResult r{step_ifrk(state, rhs, spec.diffusivities(), h, cfg.scheme), h};
  constrain(spec, r.state);
  ensure_finite(r.state);
  return r;
}

}  // namespace couette
