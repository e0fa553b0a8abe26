#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../oracles/weights_oracle.hpp"
#include "../support.hpp"
#include "couette/errors.hpp"
#include "couette/lemma_audit.hpp"
#include "couette/weights.hpp"

using namespace couette;
using testing_support::rel_err;

namespace {
constexpr double kPi = std::numbers::pi;

WeightParams params(double gamma, double mu) {
  WeightParams p;
  p.gamma = gamma;
  p.gamma_tilde = 0.0;
  p.mu = mu;
  return p;
}
}  // namespace

TEST_CASE("eval_g") {
  WeightParams p;
  p.c = 0.1;
  p.gamma = 1.0;
  CHECK(eval_g(p, 0.0) == doctest::Approx(0.1).epsilon(1e-15));
  p.gamma = 0.0;
  p.r = 1.0;
  CHECK(eval_g(p, 0.0) == doctest::Approx(0.1 / std::pow(std::log(2.0), 2)).epsilon(1e-14));
  p.gamma = 0.5;
  CHECK(eval_g(p, 3.0) == doctest::Approx(0.1 * std::pow(10.0, -0.75)).epsilon(1e-14));
  for (double gamma : {0.0, 0.5, 1.0}) {
    p.gamma = gamma;
    double prev = eval_g(p, 0.0);
    for (double s = 0.25; s < 100.0; s *= 1.3) {
      CHECK(eval_g(p, s) == eval_g(p, -s));
      CHECK(eval_g(p, s) > 0.0);
      CHECK(eval_g(p, s) <= prev);
      prev = eval_g(p, s);
    }
  }
}

TEST_CASE("resonance kernel antiderivative against quadrature") {
  for (double gamma : {0.0, 0.5, 1.0}) {
    auto K = ResonanceKernel::shared(gamma, 1.0, 0.1);
    for (double s : {-1e4, -300.0, -17.3, -2.0, -0.4, 0.0, 0.3, 1.0, 5.5, 80.0, 2e3, 5e5}) {
      double ref = oracle::g_antiderivative(gamma, 1.0, 0.1, s);
      CHECK(std::fabs(K->antiderivative(s) - ref) < 1e-11);
    }
    CHECK(K->l1_norm() == doctest::Approx(2.0 * oracle::g_upper_tail(gamma, 1.0, 0.1, 0.0)).epsilon(1e-11));
  }
}

TEST_CASE("eval_m_gamma") {
  SUBCASE("t = 0 gives 1") {
    for (double gamma : {0.0, 0.5, 1.0}) {
      auto p = params(gamma, 1e-3);
      for (int k : {-3, 0, 1, 4})
        for (double eta : {-20.0, 0.0, 3.0})
          CHECK(eval_m_gamma(p, 0.0, k, eta).m == 1.0);
    }
  }
  SUBCASE("nondecreasing in t and bounded by m_tilde") {
    auto p = params(1.0, 1e-3);
    for (int k : {1, 2, 5})
      for (double eta : {-10.0, 0.0, 10.0, 37.0}) {
        double prev = 1.0;
        for (double t = 0.0; t <= 100.0; t += 0.5) {
          auto v = eval_m_gamma(p, t, k, eta);
          CHECK(v.m >= prev);
          CHECK(v.m >= 1.0);
          CHECK(v.m <= v.m_tilde * (1.0 + 1e-15));
          CHECK(v.dlog_m >= 0.0);
          prev = v.m;
        }
      }
  }
  SUBCASE("quadrature of the defining sum at (2, 10), t = 5") {
    auto p = params(1.0, 1e-3);
    auto v = eval_m_gamma(p, 5.0, 2, 10.0);
    auto ref = oracle::m_gamma(1.0, p.r, p.c, p.mu, p.n_max, 5.0, 2, 10.0);
    CHECK(rel_err(v.m, ref.m) < 1e-8);
    CHECK(rel_err(v.m_tilde, ref.m_tilde) < 1e-8);
  }
  SUBCASE("log derivative matches a centred difference") {
    for (double gamma : {0.0, 0.5, 1.0}) {
      auto p = params(gamma, 1e-3);
      for (double t : {2.0, 7.5, 30.0}) {
        const double h = 1e-4;
        double lp = std::log(eval_m_gamma(p, t + h, 3, 12.0).m);
        double lm = std::log(eval_m_gamma(p, t - h, 3, 12.0).m);
        CHECK(eval_m_gamma(p, t, 3, 12.0).dlog_m == doctest::Approx((lp - lm) / (2 * h)).epsilon(1e-6));
      }
    }
  }
  SUBCASE("n-sum truncation") {
    auto p = params(1.0, 1e-3);
    p.n_max = 64;
    auto v = eval_m_gamma(p, 40.0, 3, 50.0);
    CHECK(v.tail_bound > 0.0);
    CHECK(v.tail_bound < 1e-3);
    // The bound covers the omitted terms.
    auto full = oracle::m_gamma(1.0, p.r, p.c, p.mu, 400, 40.0, 3, 50.0);
    CHECK(std::log(full.m_tilde) - std::log(v.m_tilde) <= v.tail_bound);
    p.n_max = 2;
    p.tail_tolerance = 1e-6;
    CHECK_THROWS_AS(eval_m_gamma(p, 1.0, 1, 1.0), TruncationBudgetExceeded);
  }
  SUBCASE("absolute bracket has no integrable kernel") {
    auto p = params(1.0, 1e-3);
    p.bracket_mode = BracketMode::Absolute;
    CHECK_THROWS_AS(eval_m_gamma(p, 1.0, 1, 1.0), ConfigInvalid);
  }
}

TEST_CASE("eval_M_mu") {
  auto p = params(1.0, 1e-3);
  CHECK(eval_M_mu(p, 0.0, 3, 7.0).value == 1.0);
  CHECK(eval_M_mu(p, 10.0, 1, 0.0).value ==
        doctest::Approx(oracle::M_mu(p.c, p.mu, 10.0, 1, 0.0)).epsilon(1e-9));
  const double sup = std::exp(kPi / p.c);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> T(0.0, 1e4), E(-1e3, 1e3);
  std::uniform_int_distribution<int> Kd(-30, 30);
  for (int s = 0; s < 2000; ++s) {
    double t = T(rng), eta = E(rng);
    int k = Kd(rng);
    auto v = eval_M_mu(p, t, k, eta);
    CHECK(v.value >= 1.0);
    CHECK(v.value <= sup);
    if (k == 0) CHECK(v.value == eval_M_mu(p, t, 1, std::fabs(eta)).value);
    CHECK(v.value == eval_M_mu(p, t, -k, -eta).value);
  }
  // The log derivative peaks at the critical time.
  CHECK(eval_M_mu(p, 5.0, 1, 5.0).dlog == doctest::Approx(std::cbrt(p.mu) / p.c));
}

TEST_CASE("eval_M_L_theta") {
  auto p = params(0.5, 1e-2);
  p.beta = 1.0;
  CHECK(eval_M_L_theta(p, 5.0, 1, 5.0).value ==
        doctest::Approx(oracle::M_L_theta(1.0, 1e-2, 5.0, 1, 5.0)).epsilon(1e-9));
  const double ct = richardson_constant(1.0);
  CHECK(ct == doctest::Approx(3.0 / 16.0));
  const double bound = std::exp(2.0 / ct);
  for (double t : {0.0, 1.0, 5.0, 100.0, 1e4})
    for (double eta : {-50.0, 0.0, 5.0, 500.0}) {
      CHECK(eval_M_L_theta(p, t, 0, eta).value == eval_M_L_theta(p, t, 1, std::fabs(eta)).value);
      for (int k : {-2, 1, 3}) {
        double v = eval_M_L_theta(p, t, k, eta).value;
        CHECK(v >= 1.0);
        CHECK(v <= M_L_theta_sup(p) * (1.0 + 1e-14));
      }
    }
  CHECK(M_L_theta_sup(p) <= bound * bound);
  p.beta = 0.5;
  CHECK_THROWS_AS(eval_M_L_theta(p, 1.0, 1, 1.0), InvalidRichardson);
  CHECK_THROWS_AS(richardson_constant(0.3), InvalidRichardson);
}

TEST_CASE("eval_M_alpha") {
  WeightParams p;
  const double c1 = 0.5;
  SUBCASE("d = (0, 1) is the M_mu profile with rate 1 / c1") {
    for (double t : {0.0, 2.0, 9.0})
      for (double eta : {-4.0, 3.0}) {
        double v = eval_M_alpha(p, {0.0, 1.0}, c1, t, 1, eta).value;
        double expect = std::exp((0.5 * kPi + std::atan(t - eta)) / c1);
        CHECK(v == doctest::Approx(expect).epsilon(1e-14));
      }
  }
  SUBCASE("quadrature of the squared integrand") {
    double v = eval_M_alpha(p, {1.0, 2.0}, c1, 4.0, 1, 3.0).value;
    CHECK(v == doctest::Approx(oracle::M_alpha(1.0, 2.0, c1, 4.0, 1, 3.0)).epsilon(1e-9));
  }
  SUBCASE("bounds and k = 0") {
    for (auto d : {std::array<double, 2>{1.0, 2.0}, {0.0, -3.0}, {-2.0, 0.5}}) {
      double sup = std::exp(kPi / (c1 * std::fabs(d[1])));
      for (double t : {0.0, 1.0, 30.0, 1e3})
        for (double eta : {-10.0, 0.5, 40.0}) {
          double v = eval_M_alpha(p, d, c1, t, 2, eta).value;
          CHECK(v >= 1.0);
          CHECK(v <= sup * (1.0 + 1e-14));
          CHECK(eval_M_alpha(p, d, c1, t, 0, eta).value == eval_M_alpha(p, d, c1, t, 1, std::fabs(eta)).value);
        }
    }
  }
  CHECK_THROWS_AS(eval_M_alpha(p, {1.0, 0.0}, c1, 1.0, 1, 1.0), DegenerateDirection);
}

TEST_CASE("eval_A") {
  WeightParams p = params(1.0, 1e-2);
  SUBCASE("disabled factors collapse to the Sobolev weight") {
    p.use_m_gamma = p.use_M_L = p.use_M_mu = false;
    for (auto m : {WeightModel::NavierStokes, WeightModel::Boussinesq, WeightModel::MhdHorizontal}) {
      CHECK(eval_A(p, m, 0.0, 2, 3.0) == doctest::Approx(std::pow(1.0 + 4.0 + 9.0, 6.0)).epsilon(1e-14));
      double ratio = eval_A(p, m, 7.0, 2, 3.0) / eval_A(p, m, 0.0, 2, 3.0);
      CHECK(ratio == doctest::Approx(std::exp(p.c * std::cbrt(p.mu) * 7.0)).epsilon(1e-13));
      CHECK(eval_A(p, m, 7.0, 0, 3.0) == eval_A(p, m, 0.0, 0, 3.0));
    }
  }
  SUBCASE("Boussinesq composite from independent factors") {
    p.gamma = 0.5;
    p.beta = 1.0;
    p.N = 12;
    const double t = 3.0, eta = 2.0;
    auto mg = oracle::m_gamma(0.5, p.r, p.c, p.mu, p.n_max, t, 1, eta);
    double m = mg.m * oracle::M_L_theta(1.0, p.mu, t, 1, eta) * oracle::M_mu(p.c, p.mu, t, 1, eta);
    double expect = std::pow(1.0 + 1.0 + eta * eta, 6.0) * std::exp(p.c * std::cbrt(p.mu) * t) / m;
    CHECK(rel_err(eval_A(p, WeightModel::Boussinesq, t, 1, eta), expect) < 1e-8);
  }
  SUBCASE("A is positive") {
    for (auto m : {WeightModel::NavierStokes, WeightModel::Boussinesq, WeightModel::MhdHorizontal,
                   WeightModel::MhdVertical}) {
      WeightParams q = p;
      q.alpha = {1.0, 0.5};
      CHECK(eval_A(q, m, 4.0, 3, -2.0) > 0.0);
    }
  }
}

TEST_CASE("WeightTable") {
  SpectralGrid g(16, 64);
  for (auto model : {WeightModel::NavierStokes, WeightModel::Boussinesq, WeightModel::MhdHorizontal,
                     WeightModel::MhdVertical}) {
    WeightParams p = params(model_gamma(model), 1e-3);
    p.alpha = model == WeightModel::MhdVertical ? std::array<double, 2>{1.0, 0.5}
                                                : std::array<double, 2>{1.0, 0.0};
    auto t0 = WeightTable::build(g, p, model, 0.0);
    auto t1 = WeightTable::build(g, p, model, 6.0);
    auto t2 = WeightTable::build(g, p, model, 12.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(t0.m_gamma[i] == 1.0);
      for (const auto* tab : {&t0, &t1, &t2}) {
        CHECK(tab->m_gamma[i] >= 1.0);
        CHECK(tab->m_tilde[i] >= 1.0);
        CHECK(tab->M_mu[i] >= 1.0);
        CHECK(tab->M_L[i] >= 1.0);
        CHECK(tab->dlog_m_dt[i] >= 0.0);
        CHECK(std::isfinite(tab->A[i]));
      }
      CHECK(t1.m[i] <= t2.m[i]);
      if (g.retained(i)) {
        auto w = eval_composite(p, model, 6.0, g.k_at(i), g.eta_at(i));
        CHECK(t1.A[i] == doctest::Approx(w.A).epsilon(1e-14));
        CHECK(t1.m[i] == doctest::Approx(t1.m_gamma[i] * t1.M_L[i] * t1.M_mu[i]).epsilon(1e-14));
      } else {
        CHECK(t1.m[i] == 1.0);
      }
    }
    if (model == WeightModel::NavierStokes)
      for (std::size_t i = 0; i < g.size(); ++i) CHECK(t1.M_L[i] == 1.0);
  }
}

TEST_CASE("audit_lemma reports") {
  SampleSpec s;
  s.samples = 2000;
  SUBCASE("M_mu bounds") {
    auto rep = audit_lemma(LemmaId::MMu, params(1.0, 1e-3), s);
    auto* item = rep.find("M_mu <= exp(pi / c)");
    REQUIRE(item != nullptr);
    CHECK(item->exact);
    CHECK(item->passed);
    CHECK(item->samples == s.samples);
  }
  SUBCASE("m_gamma bounds and the Lipschitz-type constant") {
    auto rep = audit_lemma(LemmaId::MGamma, params(1.0, 1e-3), s);
    auto* item = rep.find("m_gamma <= m_tilde");
    REQUIRE(item != nullptr);
    CHECK(item->passed);
    for (const auto& it : rep.items)
      if (!it.exact) {
        CHECK(std::isfinite(it.worst));
        CHECK(it.worst >= 0.0);
      }
  }
  SUBCASE("names round trip") {
    for (auto id : {LemmaId::MGamma, LemmaId::MMu, LemmaId::MLTheta, LemmaId::MAlpha, LemmaId::Admissible})
      CHECK(lemma_from_string(to_string(id)) == id);
    CHECK_THROWS_AS(lemma_from_string("nope"), ConfigInvalid);
  }
}

TEST_CASE("parameter validation") {
  WeightParams p;
  CHECK_NOTHROW(p.validate());
  p.gamma_tilde = 0.5;
  p.gamma = 0.25;
  CHECK_THROWS_AS(p.validate(), ConfigInvalid);
  p = WeightParams{};
  p.mu = 0.75;
  CHECK_THROWS_AS(p.validate(), ConfigInvalid);
  p = WeightParams{};
  p.N = 11;
  CHECK_THROWS_AS(p.validate(), ConfigInvalid);
}
