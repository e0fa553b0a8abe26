#include "couette/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "couette/errors.hpp"

namespace couette {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_mean_zero(const SpectralField& f, const char* name) {
  for (int c = 0; c < f.components(); ++c)
    if (f.at(c, 0) != cplx{})
      throw SingularSymbolAtZeroMode(std::string(name) + " must have a zero (0,0) mode");
}

// Physical grid values of d_x f and d_y^t f for one component.
struct PhysicalGradient {
  std::vector<double> dx, dy;
};

PhysicalGradient physical_gradient(const SpectralField& f, int c, double t) {
  const auto& g = f.grid();
  std::vector<cplx> a(f.modes()), b(f.modes());
  for (std::size_t i = 0; i < f.modes(); ++i) {
    double k = g.k_at(i);
    a[i] = kI * k * f.at(c, i);
    b[i] = kI * (g.eta_at(i) - k * t) * f.at(c, i);
  }
  return {to_physical(g, a), to_physical(g, b)};
}

// Spectral coefficients of (v . grad_t) f for scalar component c of f.
void add_transport(std::vector<double>& acc, double sign, const std::vector<double>& vx,
                   const std::vector<double>& vy, const PhysicalGradient& grad) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += sign * (vx[i] * grad.dx[i] + vy[i] * grad.dy[i]);
}

void zero_mean(SpectralField& f) {
  for (int c = 0; c < f.components(); ++c) f.at(c, 0) = 0.0;
}

// Leray projection plus the gradient that restores d/dt div_t = 0:
// P_t[F] + grad_t Delta_t^{-1} d_x f^y.
SpectralField constrained_update(const SpectralField& F, const SpectralField& f, double t) {
  auto out = leray_project(F, t);
  const auto& g = F.grid();
  for (std::size_t i = 0; i < F.modes(); ++i) {
    double k = g.k_at(i);
    double q = g.eta_at(i) - k * t;
    double l2 = k * k + q * q;
    if (l2 == 0.0) continue;
    cplx fy = f.at(1, i);
    out.at(0, i) += k * k / l2 * fy;
    out.at(1, i) += k * q / l2 * fy;
  }
  return out;
}

}  // namespace

std::string to_string(ModelKind m) { return to_string(weight_model_of(m)); }

ModelKind model_from_string(const std::string& s) {
  switch (weight_model_from_string(s)) {
    case WeightModel::NavierStokes: return ModelKind::NavierStokes;
    case WeightModel::Boussinesq: return ModelKind::Boussinesq;
    case WeightModel::MhdHorizontal: return ModelKind::MhdHorizontal;
    case WeightModel::MhdVertical: return ModelKind::MhdVertical;
  }
  return ModelKind::NavierStokes;
}

WeightModel weight_model_of(ModelKind m) {
  switch (m) {
    case ModelKind::NavierStokes: return WeightModel::NavierStokes;
    case ModelKind::Boussinesq: return WeightModel::Boussinesq;
    case ModelKind::MhdHorizontal: return WeightModel::MhdHorizontal;
    case ModelKind::MhdVertical: return WeightModel::MhdVertical;
  }
  return WeightModel::NavierStokes;
}

void ModelSpec::validate() const {
  if (!(nu >= 0.0) || !(kappa >= 0.0)) throw ConfigInvalid("dissipation coefficients must be >= 0");
  switch (model) {
    case ModelKind::NavierStokes: break;
    case ModelKind::Boussinesq:
      if (!(beta > 0.5)) throw InvalidRichardson("Boussinesq needs beta > 1/2");
      break;
    case ModelKind::MhdHorizontal:
      if (alpha[0] == 0.0 || alpha[1] != 0.0)
        throw ConfigInvalid("horizontal MHD needs alpha_1 != 0 and alpha_2 = 0");
      break;
    case ModelKind::MhdVertical:
      if (alpha[1] == 0.0) throw ConfigInvalid("vertical MHD needs alpha_2 != 0");
      break;
  }
}

std::vector<int> ModelSpec::field_components() const {
  switch (model) {
    case ModelKind::NavierStokes: return {1};
    case ModelKind::Boussinesq: return {1, 1};
    default: return {2, 2};
  }
}

std::vector<double> ModelSpec::diffusivities() const {
  if (model == ModelKind::NavierStokes) return {nu};
  return {nu, kappa};
}

std::vector<std::string> ModelSpec::field_names() const {
  switch (model) {
    case ModelKind::NavierStokes: return {"w"};
    case ModelKind::Boussinesq: return {"w", "theta"};
    default: return {"v", "b"};
  }
}

State make_zero_state(const ModelSpec& spec, const SpectralGrid& grid, double t) {
  State s;
  s.t = t;
  for (int nc : spec.field_components()) s.fields.emplace_back(grid, nc);
  return s;
}

SpectralField velocity_from_vorticity(const SpectralField& w, double t) {
  if (w.components() != 1) throw NonconformalGrid("vorticity must be a scalar field");
  const auto& g = w.grid();
  SpectralField v(g, 2);
  for (std::size_t i = 0; i < w.modes(); ++i) {
    double k = g.k_at(i);
    double q = g.eta_at(i) - k * t;
    double l2 = k * k + q * q;
    if (l2 == 0.0) continue;
    v.at(0, i) = kI * q * w.at(0, i) / l2;
    v.at(1, i) = -kI * k * w.at(0, i) / l2;
  }
  return v;
}

SpectralField ns_rhs(const SpectralField& w, double t, bool linear) {
  require_mean_zero(w, "w");
  SpectralField out(w.grid(), 1);
  if (linear) return out;
  auto v = velocity_from_vorticity(w, t);
  auto vx = to_physical(v, 0), vy = to_physical(v, 1);
  std::vector<double> acc(w.modes(), 0.0);
  add_transport(acc, -1.0, vx, vy, physical_gradient(w, 0, t));
  out = from_physical(w.grid(), acc);
  zero_mean(out);
  return out;
}

std::pair<SpectralField, SpectralField> boussinesq_rhs(const SpectralField& w,
                                                       const SpectralField& theta, double t,
                                                       const ModelSpec& spec) {
  require_mean_zero(w, "w");
  require_mean_zero(theta, "theta");
  const auto& g = w.grid();
  auto v = velocity_from_vorticity(w, t);
  SpectralField dw(g, 1), dth(g, 1);
  if (!spec.linear) {
    auto vx = to_physical(v, 0), vy = to_physical(v, 1);
    std::vector<double> aw(w.modes(), 0.0), at(w.modes(), 0.0);
    add_transport(aw, -1.0, vx, vy, physical_gradient(w, 0, t));
    add_transport(at, -1.0, vx, vy, physical_gradient(theta, 0, t));
    dw = from_physical(g, aw);
    dth = from_physical(g, at);
  }
  const double b2 = spec.beta * spec.beta;
  for (std::size_t i = 0; i < w.modes(); ++i) {
    double k = g.k_at(i);
    dw.at(0, i) -= kI * k * theta.at(0, i);
    dth.at(0, i) += b2 * v.at(1, i);
  }
  zero_mean(dw);
  zero_mean(dth);
  return {std::move(dw), std::move(dth)};
}

std::pair<SpectralField, SpectralField> mhd_rhs(const SpectralField& v, const SpectralField& b,
                                                double t, const ModelSpec& spec) {
  if (v.components() != 2 || b.components() != 2)
    throw NonconformalGrid("MHD fields are 2-component");
  const auto& g = v.grid();
  const auto a = spec.alpha;
  SpectralField Fv(g, 2), Fb(g, 2);
  if (!spec.linear) {
    std::vector<double> px[2] = {to_physical(v, 0), to_physical(v, 1)};
    std::vector<double> pb[2] = {to_physical(b, 0), to_physical(b, 1)};
    for (int c = 0; c < 2; ++c) {
      auto gv = physical_gradient(v, c, t);
      auto gb = physical_gradient(b, c, t);
      std::vector<double> nv(v.modes(), 0.0), nb(v.modes(), 0.0);
      add_transport(nv, 1.0, pb[0], pb[1], gb);
      add_transport(nv, -1.0, px[0], px[1], gv);
      add_transport(nb, 1.0, pb[0], pb[1], gv);
      add_transport(nb, -1.0, px[0], px[1], gb);
      auto sv = from_physical(g, nv);
      auto sb = from_physical(g, nb);
      std::copy(sv.component(0).begin(), sv.component(0).end(), Fv.component(c).begin());
      std::copy(sb.component(0).begin(), sb.component(0).end(), Fb.component(c).begin());
    }
  }
  for (std::size_t i = 0; i < v.modes(); ++i) {
    double k = g.k_at(i);
    double q = g.eta_at(i) - k * t;
    cplx adot = kI * (a[0] * k + a[1] * q);
    for (int c = 0; c < 2; ++c) {
      Fv.at(c, i) += adot * b.at(c, i);
      Fb.at(c, i) += adot * v.at(c, i);
    }
    Fv.at(0, i) -= v.at(1, i);
    Fb.at(0, i) += b.at(1, i);
  }
  return {constrained_update(Fv, v, t), constrained_update(Fb, b, t)};
}

std::vector<SpectralField> model_rhs(const ModelSpec& spec, const State& s) {
  switch (spec.model) {
    case ModelKind::NavierStokes: return {ns_rhs(s.fields.at(0), s.t, spec.linear)};
    case ModelKind::Boussinesq: {
      auto [dw, dth] = boussinesq_rhs(s.fields.at(0), s.fields.at(1), s.t, spec);
      return {std::move(dw), std::move(dth)};
    }
    default: {
      auto [dv, db] = mhd_rhs(s.fields.at(0), s.fields.at(1), s.t, spec);
      return {std::move(dv), std::move(db)};
    }
  }
}

double max_frequency(const ModelSpec& spec, const State& s, double dt) {
  const auto& g = s.fields.at(0).grid();
  const double kmax = g.kmax(), emax = g.eta_max();
  double rate = 0.0;
  auto advective = [&](const std::vector<double>& ux, const std::vector<double>& uy) {
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < ux.size(); ++i) {
      sx = std::max(sx, std::fabs(ux[i] - s.t * uy[i]));
      sy = std::max(sy, std::fabs(uy[i]));
    }
    return sx * kmax + sy * emax;
  };
  if (spec.model == ModelKind::NavierStokes || spec.model == ModelKind::Boussinesq) {
    if (!spec.linear) {
      auto v = velocity_from_vorticity(s.fields[0], s.t);
      rate = advective(to_physical(v, 0), to_physical(v, 1));
    }
    if (spec.model == ModelKind::Boussinesq) rate += spec.beta;
    return rate;
  }
  if (!spec.linear) {
    rate = advective(to_physical(s.fields[0], 0), to_physical(s.fields[0], 1)) +
           advective(to_physical(s.fields[1], 0), to_physical(s.fields[1], 1));
  }
  // Alfven coupling on modes the integrating factor leaves active, plus the
  // O(1) lift-up and stretching terms.
  double mu = std::min(spec.nu, spec.kappa);
  double alf = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.retained(i)) continue;
    double k = g.k_at(i);
    double q = g.eta_at(i) - k * s.t;
    if (mu * (k * k + q * q) * dt > 18.0) continue;
    alf = std::max(alf, std::fabs(spec.alpha[0] * k + spec.alpha[1] * q));
  }
  return rate + alf + 2.0;
}

void constrain(const ModelSpec& spec, State& s) {
  if (spec.model == ModelKind::MhdHorizontal || spec.model == ModelKind::MhdVertical)
    for (auto& f : s.fields) f = leray_project(f, s.t);
}

std::pair<SpectralField, SpectralField> adapted_boussinesq(const SpectralField& w,
                                                           const SpectralField& theta, double t,
                                                           double beta) {
  if (!(beta > 0.0)) throw InvalidRichardson("adapted variables need beta > 0");
  auto z1 = lambda_power(w, t, -0.5);
  auto z2 = lambda_power(theta, t, 0.5);
  z2 *= 1.0 / beta;
  return {std::move(z1), std::move(z2)};
}

std::pair<SpectralField, SpectralField> from_adapted_boussinesq(const SpectralField& zeta1,
                                                                const SpectralField& zeta2,
                                                                double t, double beta) {
  if (!(beta > 0.0)) throw InvalidRichardson("adapted variables need beta > 0");
  auto w = lambda_power(zeta1, t, 0.5);
  auto th = lambda_power(zeta2, t, -0.5);
  th *= beta;
  return {std::move(w), std::move(th)};
}

std::pair<SpectralField, SpectralField> adapted_mhd(const SpectralField& v, const SpectralField& b,
                                                    double t, const ModelSpec& spec) {
  if (v.components() != 2 || b.components() != 2)
    throw NonconformalGrid("MHD fields are 2-component");
  const auto& g = v.grid();
  const auto a = spec.alpha;
  bool horizontal = spec.model == ModelKind::MhdHorizontal;
  if (horizontal && a[0] == 0.0) throw DegenerateDirection("horizontal adaption needs alpha_1 != 0");
  if (!horizontal && a[1] == 0.0) throw DegenerateDirection("vertical adaption needs alpha_2 != 0");
  SpectralField vt = v;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double k = g.k_at(i);
    if (k == 0.0) continue;
    cplx sym;
    if (horizontal) {
      sym = 1.0 / (kI * k * a[0]);
    } else {
      double A = a[0] * k + a[1] * (g.eta_at(i) - k * t);
      sym = kI * A / (1.0 + A * A);
    }
    vt.at(0, i) += sym * b.at(1, i);
  }
  return {std::move(vt), b};
}

}  // namespace couette
