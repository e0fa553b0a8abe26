#include "couette/lemma_audit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "couette/errors.hpp"

namespace couette {

namespace {

constexpr double kFloor = 1e-300;

class Check {
 public:
  Check(std::string name, bool exact, const SampleSpec& spec, bool gating = true)
      : spec_(spec) {
    item_.name = std::move(name);
    item_.exact = exact;
    item_.gating = gating;
  }

  // Records lhs <= rhs (exact) or lhs <~ rhs. `first_half` marks samples
  // from the initial n draws.
  void add(double lhs, double rhs, bool first_half) {
    if (item_.exact) {
      if (!first_half) return;
      ++item_.samples;
      double scale = std::max({std::fabs(lhs), std::fabs(rhs), kFloor});
      double excess = (lhs - rhs) / scale;
      if (excess > spec_.exact_slack || !std::isfinite(lhs) || !std::isfinite(rhs)) {
        ++item_.violations;
        item_.worst = std::max(item_.worst, std::isfinite(excess) ? excess : HUGE_VAL);
      }
      return;
    }
    ++item_.samples;
    double ratio = lhs / std::max(rhs, kFloor);
    if (!std::isfinite(ratio)) ratio = HUGE_VAL;
    if (first_half) item_.constant_half = std::max(item_.constant_half, ratio);
    item_.worst = std::max(item_.worst, ratio);
  }

  AuditItem finish(std::string note = {}) {
    if (item_.exact) {
      item_.passed = item_.violations == 0;
    } else {
      item_.stable = item_.worst <= 2.0 * item_.constant_half ||
                     (item_.worst == 0.0 && item_.constant_half == 0.0);
      item_.passed = std::isfinite(item_.worst) && item_.worst < spec_.constant_ceiling && item_.stable;
    }
    item_.note = std::move(note);
    return item_;
  }

 private:
  const SampleSpec& spec_;
  AuditItem item_;
};

struct Sample {
  double t, t2;
  int k, l;
  double eta, xi;
};

class Sampler {
 public:
  explicit Sampler(const SampleSpec& s) : spec_(s), rng_(s.seed) {}
  Sample next() {
    std::uniform_real_distribution<double> ut(0.0, spec_.t_max);
    std::uniform_int_distribution<int> uk(-spec_.k_max, spec_.k_max);
    std::uniform_real_distribution<double> ueta(-spec_.eta_max, spec_.eta_max);
    std::uniform_real_distribution<double> unear(-10.0, 10.0);
    std::uniform_int_distribution<int> udk(-spec_.pair_dk, spec_.pair_dk);
    std::uniform_real_distribution<double> udeta(-spec_.pair_deta, spec_.pair_deta);
    std::uniform_real_distribution<double> udt(0.0, 5.0);
    std::bernoulli_distribution coin(0.5);
    Sample s;
    s.t = ut(rng_);
    s.t2 = s.t + udt(rng_);
    s.k = uk(rng_);
    // Half the draws sit near the critical time eta = k t.
    s.eta = (s.k != 0 && coin(rng_)) ? s.k * (s.t + unear(rng_)) : ueta(rng_);
    s.l = s.k + udk(rng_);
    s.xi = s.eta + udeta(rng_);
    return s;
  }

 private:
  const SampleSpec& spec_;
  std::mt19937_64 rng_;
};

double norm2d(double a, double b) { return std::hypot(a, b); }

double bracket2(double a, double b) { return std::sqrt(1.0 + a * a + b * b); }

AuditReport audit_m_gamma(const WeightParams& p, const SampleSpec& spec) {
  auto kernel = ResonanceKernel::shared(p.gamma, p.r, p.c);
  // Sum of <m>^{-3} over Z bounds the n-sum weights.
  double s3 = 0.0;
  for (int m = -100000; m <= 100000; ++m) s3 += std::pow(1.0 + double(m) * m, -1.5);
  s3 += 1.0 / (1e10);
  const double C = std::exp(kernel->l1_norm() * s3);
  const double mu13 = std::cbrt(p.mu);

  Check lower("m_gamma >= 1", true, spec);
  Check order("m_gamma <= m_tilde", true, spec);
  Check upper("m_tilde <= exp(|g|_1 sum <n>^-3)", true, spec);
  Check mono("t -> m_gamma nondecreasing", true, spec);
  Check mono_t("t -> m_tilde nondecreasing", true, spec);
  Check deriv("dlog m_gamma >= min(1, t mu^1/3) dlog m_tilde", true, spec);
  Check at0("m_gamma(t=0) = 1", true, spec);
  Check trans("sqrt(dlog m_tilde(k,eta)) <~ sqrt(dlog m_tilde(l,xi)) <k-l,eta-xi>^5", false, spec);
  Check reso("resonant kernel <~ dlog m_tilde(l,xi) <k-l,eta-xi>^5", false, spec);
  Check diff("|m(k,eta) - m(l,xi)| <~ min(1, mu^1/3 t)", false, spec);
  Check lip("|m(k,eta) - m(k,xi)| <~ |eta-xi| / <k>", false, spec);

  Sampler sampler(spec);
  for (std::size_t i = 0; i < 2 * spec.samples; ++i) {
    bool first = i < spec.samples;
    Sample s = sampler.next();
    auto a = eval_m_gamma(p, s.t, s.k, s.eta);
    auto a2 = eval_m_gamma(p, s.t2, s.k, s.eta);
    auto b = eval_m_gamma(p, s.t, s.l, s.xi);
    auto c = eval_m_gamma(p, s.t, s.k, s.xi);
    lower.add(1.0, a.m, first);
    order.add(a.m, a.m_tilde, first);
    upper.add(a.m_tilde, C, first);
    mono.add(a.m, a2.m, first);
    mono_t.add(a.m_tilde, a2.m_tilde, first);
    deriv.add(std::min(1.0, s.t * mu13) * a.dlog_m_tilde, a.dlog_m, first);
    if (first) {
      auto z = eval_m_gamma(p, 0.0, s.k, s.eta);
      at0.add(std::fabs(z.m - 1.0), 0.0, first);
    }
    double br5 = std::pow(bracket2(s.k - s.l, s.eta - s.xi), 5);
    trans.add(std::sqrt(a.dlog_m_tilde), std::sqrt(b.dlog_m_tilde) * br5, first);
    if (s.k != 0) {
      double sres = bracket(s.eta / s.k - s.t);
      double lhs = p.gamma > 0.0 ? std::pow(sres, -(1.0 + p.gamma))
                                 : 1.0 / (sres * std::pow(std::log1p(sres), 1.0 + p.r));
      reso.add(lhs, b.dlog_m_tilde * br5, first);
    }
    diff.add(std::fabs(a.m - b.m), std::min(1.0, mu13 * s.t), first);
    if (norm2d(s.k, s.xi) >= std::fabs(s.eta - s.xi))
      lip.add(std::fabs(a.m - c.m), std::fabs(s.eta - s.xi) / bracket(s.k), first);
  }
  AuditReport r{LemmaId::MGamma, {}};
  r.items = {lower.finish(), order.finish(), upper.finish(), mono.finish(), mono_t.finish(),
             deriv.finish(), at0.finish(), trans.finish(),
             reso.finish("the stated inequality carries no constant; c enters through g"),
             diff.finish(), lip.finish()};
  return r;
}

AuditReport audit_M_mu(const WeightParams& p, const SampleSpec& spec) {
  const double bound = std::exp(std::numbers::pi / p.c);
  const double mu13 = std::cbrt(p.mu);
  Check lower("M_mu >= 1", true, spec);
  Check upper("M_mu <= exp(pi / c)", true, spec);
  Check mono("t -> M_mu nondecreasing", true, spec);
  Check dpos("dlog M_mu >= 0", true, spec);
  Check k0("M_mu(0,eta) = M_mu(1,|eta|)", true, spec);
  Check at0("M_mu(t=0) = 1", true, spec);
  Check ed("mu^1/3 <~ c dlog M_mu + 2 c mu (1 + |t - eta/k|^2)", false, spec);
  Check lip("|M_mu(k,eta) - M_mu(k,xi)| <~ |eta-xi| / |k|", false, spec);
  Check comm("|M_mu(k,eta) - M_mu(l,xi)| <~ mu^1/3 (|l,xi-lt| + t) <eta-xi,k-l>^2", false, spec);

  Sampler sampler(spec);
  for (std::size_t i = 0; i < 2 * spec.samples; ++i) {
    bool first = i < spec.samples;
    Sample s = sampler.next();
    auto a = eval_M_mu(p, s.t, s.k, s.eta);
    auto a2 = eval_M_mu(p, s.t2, s.k, s.eta);
    lower.add(1.0, a.value, first);
    upper.add(a.value, bound, first);
    mono.add(a.value, a2.value, first);
    dpos.add(0.0, a.dlog, first);
    if (first) {
      auto z0 = eval_M_mu(p, s.t, 0, s.eta);
      auto z1 = eval_M_mu(p, s.t, 1, std::fabs(s.eta));
      k0.add(std::fabs(z0.value - z1.value), 0.0, first);
      at0.add(std::fabs(eval_M_mu(p, 0.0, s.k, s.eta).value - 1.0), 0.0, first);
    }
    if (s.k != 0) {
      double d = s.t - s.eta / s.k;
      ed.add(mu13, p.c * a.dlog + 2.0 * p.c * p.mu * (1.0 + d * d), first);
      if (norm2d(s.k, s.xi) >= std::fabs(s.eta - s.xi)) {
        auto c = eval_M_mu(p, s.t, s.k, s.xi);
        lip.add(std::fabs(a.value - c.value), std::fabs(s.eta - s.xi) / std::abs(s.k), first);
      }
    }
    if (norm2d(s.l, s.xi) >= norm2d(s.k - s.l, s.eta - s.xi)) {
      auto b = eval_M_mu(p, s.t, s.l, s.xi);
      double rhs = mu13 * (norm2d(s.l, s.xi - s.l * s.t) + s.t) *
                   std::pow(bracket2(s.eta - s.xi, s.k - s.l), 2);
      comm.add(std::fabs(a.value - b.value), rhs, first);
    }
  }
  AuditReport r{LemmaId::MMu, {}};
  r.items = {lower.finish(), upper.finish(), mono.finish(), dpos.finish(), k0.finish(),
             at0.finish(),
             ed.finish(p.c >= 0.5 ? "exact for c >= 1/2"
                                  : "holds with constant 1 only for c >= 1/2"),
             lip.finish(), comm.finish()};
  return r;
}

AuditReport audit_M_L_theta(const WeightParams& p, const SampleSpec& spec) {
  const double ct = richardson_constant(p.beta);
  const double sup = M_L_theta_sup(p);
  const double stated = std::exp(2.0 / ct);
  const double mu13 = std::cbrt(p.mu);
  Check lower("M_L^theta >= 1", true, spec);
  Check upper("M_L^theta <= exp(4 S(W) / c_theta)", true, spec);
  Check stated_bound("M_L^theta <= exp(2 / c_theta) (stated constant)", true, spec, false);
  Check mono("t -> M_L^theta nondecreasing", true, spec);
  Check dpos("dlog M_L^theta >= 0", true, spec);
  Check k0("M_L^theta(0,eta) = M_L^theta(1,|eta|)", true, spec);
  Check lin("<t-eta/k>^-3/2 <~ c dlog M_L^theta + c mu^1/3", false, spec);
  Check lip("|M_L^theta(k,eta) - M_L^theta(k,xi)| <~ |eta-xi| / <k>", false, spec);

  Sampler sampler(spec);
  for (std::size_t i = 0; i < 2 * spec.samples; ++i) {
    bool first = i < spec.samples;
    Sample s = sampler.next();
    auto a = eval_M_L_theta(p, s.t, s.k, s.eta);
    auto a2 = eval_M_L_theta(p, s.t2, s.k, s.eta);
    lower.add(1.0, a.value, first);
    upper.add(a.value, sup, first);
    stated_bound.add(a.value, stated, first);
    mono.add(a.value, a2.value, first);
    dpos.add(0.0, a.dlog, first);
    if (first) {
      auto z0 = eval_M_L_theta(p, s.t, 0, s.eta);
      auto z1 = eval_M_L_theta(p, s.t, 1, std::fabs(s.eta));
      k0.add(std::fabs(z0.value - z1.value), 0.0, first);
    }
    if (s.k != 0) {
      double d = s.t - s.eta / s.k;
      lin.add(std::pow(bracket(d), -1.5), ct * a.dlog + ct * mu13, first);
    }
    if (norm2d(s.k, s.xi) >= std::fabs(s.eta - s.xi)) {
      auto c = eval_M_L_theta(p, s.t, s.k, s.xi);
      lip.add(std::fabs(a.value - c.value), std::fabs(s.eta - s.xi) / bracket(s.k), first);
    }
  }
  AuditReport r{LemmaId::MLTheta, {}};
  r.items = {lower.finish(), upper.finish(),
             stated_bound.finish("the window integral reaches 2 S(W), twice the stated exponent"),
             mono.finish(), dpos.finish(), k0.finish(), lin.finish(),
             lip.finish("constant scales with sup M_L^theta * 2 / c_theta")};
  return r;
}

AuditReport audit_M_alpha(const WeightParams& p, const SampleSpec& spec) {
  const auto d = spec.d;
  const double c1 = spec.c1;
  const double bound = std::exp(std::numbers::pi / (c1 * std::fabs(d[1])));
  const double stated = std::exp(2.0 * std::numbers::pi / std::fabs(d[1]));
  Check lower("M_L,d,c1 >= 1", true, spec);
  Check upper("M_L,d,c1 <= exp(pi / (c1 |d2|))", true, spec);
  Check stated_bound("M_L,d,c1 <= exp(2 pi / |d2|) (stated constant)", true, spec, false);
  Check mono("t -> M_L,d,c1 nondecreasing", true, spec);
  Check dpos("dlog M_L,d,c1 >= 0", true, spec);
  Check k0("M_L,d,c1(0,eta) = M_L,d,c1(1,|eta|)", true, spec);
  Check lip("|M(k,eta) - M(k,xi)| <~ |eta-xi| / |k|", false, spec);

  Sampler sampler(spec);
  for (std::size_t i = 0; i < 2 * spec.samples; ++i) {
    bool first = i < spec.samples;
    Sample s = sampler.next();
    auto a = eval_M_alpha(p, d, c1, s.t, s.k, s.eta);
    auto a2 = eval_M_alpha(p, d, c1, s.t2, s.k, s.eta);
    lower.add(1.0, a.value, first);
    upper.add(a.value, bound, first);
    stated_bound.add(a.value, stated, first);
    mono.add(a.value, a2.value, first);
    dpos.add(0.0, a.dlog, first);
    if (first) {
      auto z0 = eval_M_alpha(p, d, c1, s.t, 0, s.eta);
      auto z1 = eval_M_alpha(p, d, c1, s.t, 1, std::fabs(s.eta));
      k0.add(std::fabs(z0.value - z1.value), 0.0, first);
    }
    if (s.k != 0 && norm2d(s.l, s.xi) >= norm2d(s.k - s.l, s.eta - s.xi)) {
      auto c = eval_M_alpha(p, d, c1, s.t, s.k, s.xi);
      lip.add(std::fabs(a.value - c.value), std::fabs(s.eta - s.xi) / std::abs(s.k), first);
    }
  }
  AuditReport r{LemmaId::MAlpha, {}};
  r.items = {lower.finish(), upper.finish(),
             stated_bound.finish("the stated constant omits the 1/c1 factor of the definition"),
             mono.finish(), dpos.finish(), k0.finish(), lip.finish()};
  return r;
}

AuditReport audit_admissible(const WeightParams& p, const SampleSpec& spec) {
  WeightParams q = p;
  q.use_m_gamma = false;
  q.use_M_mu = false;
  auto linear = [&](double t, int k, double eta) {
    return eval_composite(q, spec.model, t, k, eta).M_L;
  };
  Check mono("monotone: t -> M_L nondecreasing", true, spec);
  Check dpos("monotone: dlog M_L >= 0", true, spec);
  Check lower("bounded: M_L >= 1", true, spec);
  Check upper("bounded: sup M_L over samples", false, spec);
  Check comm("commutator 2: |M_L(k,eta) - M_L(k,xi)| <~ |eta-xi| <eta-xi>^{N-5} / k", false, spec);

  Sampler sampler(spec);
  for (std::size_t i = 0; i < 2 * spec.samples; ++i) {
    bool first = i < spec.samples;
    Sample s = sampler.next();
    auto a = linear(s.t, s.k, s.eta);
    auto a2 = linear(s.t2, s.k, s.eta);
    mono.add(a.value, a2.value, first);
    dpos.add(0.0, a.dlog, first);
    lower.add(1.0, a.value, first);
    upper.add(a.value, 1.0, first);
    if (s.k != 0 && norm2d(s.k, s.xi) >= 8.0 * std::fabs(s.eta - s.xi)) {
      auto c = linear(s.t, s.k, s.xi);
      double de = std::fabs(s.eta - s.xi);
      comm.add(std::fabs(a.value - c.value),
               de * std::pow(bracket(de), p.N - 5) / std::abs(s.k), first);
    }
  }
  AuditReport r{LemmaId::Admissible, {}};
  r.items = {mono.finish(), dpos.finish(), lower.finish(),
             upper.finish("constant is the sampled sup of the linear weight"), comm.finish()};
  r.items[3].gating = false;
  return r;
}

}  // namespace

std::string to_string(LemmaId id) {
  switch (id) {
    case LemmaId::MGamma: return "m_gamma";
    case LemmaId::MMu: return "M_mu";
    case LemmaId::MLTheta: return "M_L_theta";
    case LemmaId::MAlpha: return "M_alpha";
    case LemmaId::Admissible: return "admissible";
  }
  return "unknown";
}

LemmaId lemma_from_string(const std::string& s) {
  for (auto id : {LemmaId::MGamma, LemmaId::MMu, LemmaId::MLTheta, LemmaId::MAlpha,
                  LemmaId::Admissible})
    if (to_string(id) == s) return id;
  throw ConfigInvalid("unknown lemma id '" + s + "'");
}

bool AuditReport::passed() const {
  return std::all_of(items.begin(), items.end(),
                     [](const AuditItem& it) { return !it.gating || it.passed; });
}

const AuditItem* AuditReport::find(const std::string& name) const {
  for (const auto& it : items)
    if (it.name == name) return &it;
  return nullptr;
}

AuditReport audit_lemma(LemmaId lemma, const WeightParams& params, const SampleSpec& spec) {
  try {
    switch (lemma) {
      case LemmaId::MGamma: return audit_m_gamma(params, spec);
      case LemmaId::MMu: return audit_M_mu(params, spec);
      case LemmaId::MLTheta: return audit_M_L_theta(params, spec);
      case LemmaId::MAlpha: return audit_M_alpha(params, spec);
      case LemmaId::Admissible: return audit_admissible(params, spec);
    }
  } catch (const Error& e) {
    AuditItem failed;
    failed.name = "evaluation";
    failed.passed = false;
    failed.note = e.what();
    return {lemma, {failed}};
  }
  return {lemma, {}};
}

}  // namespace couette
