#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "couette/config.hpp"
#include "couette/csv.hpp"
#include "couette/echo.hpp"
#include "couette/errors.hpp"
#include "couette/harness.hpp"
#include "json.hpp"

using namespace couette;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
  const char* env = std::getenv("COUETTE_TEST_TMP");
  fs::path p = env ? fs::path(env) : fs::temp_directory_path() / "couette_tests";
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Small nonlinear NS run on a 16 x 32 grid.
SimConfig small_ns(double mu = 1e-2) {
  return parse_config(R"({
    "model": {"type": "ns", "mu": )" + std::to_string(mu) + R"(},
    "grid": {"nx": 16, "ny": 32},
    "initial": {"profile": "random", "epsilon": 1e-3, "seed": 7, "band_k": 3, "band_j": 6},
    "stepper": {"dt": 0.1}
  })");
}

}  // namespace

TEST_CASE("config parsing") {
  auto cfg = parse_config("{}");
  CHECK(cfg.model.model == ModelKind::NavierStokes);
  CHECK(cfg.grid.nx == 64);
  CHECK(cfg.grid.ny == 256);
  CHECK(cfg.resolved_t_end() == doctest::Approx(5.0 / std::cbrt(1e-3)));
  CHECK(cfg.weights.gamma == 1.0);
  CHECK(cfg.weights.gamma_tilde == 0.0);

  auto b = parse_config(R"({"model": {"type": "boussinesq", "mu": 1e-3, "beta": 2}})");
  CHECK(b.weights.gamma == 0.5);
  CHECK(b.weights.gamma_tilde == 0.5);
  CHECK(b.weights.beta == 2.0);
  CHECK(b.model.kappa == 1e-3);

  auto m = parse_config(R"({"model": {"type": "mhd_vertical", "nu": 2e-3, "kappa": 1e-3, "alpha": [0.5, 1]},
                            "weights": {"gamma": 0.5}})");
  CHECK(m.mu() == 1e-3);
  CHECK(m.weights.gamma == 0.5);
  CHECK(m.weights.alpha[1] == 1.0);
  CHECK(m.weights.nu == 2e-3);

  CHECK(parse_config(R"({"stepper": {"t_end": 12}})").resolved_t_end() == 12.0);

  CHECK_THROWS_AS(parse_config(R"({"model": {"viscosity": 1}})"), ConfigInvalid);
  CHECK_THROWS_AS(parse_config(R"({"extra": 1})"), ConfigInvalid);
  CHECK_THROWS_AS(parse_config(R"({"model": {"type": "euler"}})"), ConfigInvalid);
  CHECK_THROWS_AS(parse_config(R"({"model": {"type": "boussinesq", "beta": 0.4}})"), InvalidRichardson);
  CHECK_THROWS_AS(parse_config(R"({"model": {"nu": "small"}})"), ConfigInvalid);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"nx": 63}})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"stepper": {"t_end": 0.5}})"), ConfigInvalid);
  CHECK_THROWS_AS(parse_config(R"({"classifier": {"g_stable": 10, "g_unstable": 5}})"), ConfigInvalid);
  CHECK_THROWS_AS(parse_config("{ model: "), ConfigInvalid);
  CHECK_THROWS_AS(load_config((tmp_dir() / "missing.json").string()), ConfigInvalid);
}

TEST_CASE("config round trip and hash") {
  auto cfg = small_ns();
  auto again = parse_config(to_json(cfg));
  CHECK(to_json(again) == to_json(cfg));
  CHECK(config_hash(again) == config_hash(cfg));
  CHECK(config_hash(cfg).size() == 16);
  auto other = cfg;
  other.initial.seed = 8;
  CHECK(config_hash(other) != config_hash(cfg));
}

TEST_CASE("initial states") {
  auto cfg = small_ns();
  auto a = make_initial_state(cfg), b = make_initial_state(cfg);
  CHECK(a.fields[0].raw() == b.fields[0].raw());
  const auto& f = a.fields[0];
  CHECK(f.hermitian_defect() == 0.0);
  CHECK(f.at(0, 0) == cplx{});
  double hn = 0.0;
  for (std::size_t i = 0; i < f.modes(); ++i) {
    double k = f.grid().k_at(i), eta = f.grid().eta_at(i);
    if (std::abs(f.grid().k_at(i)) > 3 || std::abs(f.grid().j_at(i)) > 6) CHECK(f.at(0, i) == cplx{});
    hn += std::pow(1.0 + k * k + eta * eta, cfg.weights.N) * std::norm(f.at(0, i));
  }
  CHECK(std::sqrt(hn) == doctest::Approx(1e-3).epsilon(1e-12));

  auto mhd = parse_config(R"({"model": {"type": "mhd_horizontal"}, "grid": {"nx": 16, "ny": 32}})");
  auto s = make_initial_state(mhd);
  CHECK(max_abs_div_t(s.fields[0], 0.0) < 1e-15);
  CHECK(max_abs_div_t(s.fields[1], 0.0) < 1e-15);
  CHECK(s.fields[1].norm2() > 0.0);

  auto pair = small_ns();
  pair.initial.profile = InitialProfile::EchoPair;
  pair.initial.k = 1;
  pair.initial.j = 0;
  auto p = make_initial_state(pair);
  CHECK(p.fields[0](0, 1, 0) == cplx{1e-3});
  CHECK(p.fields[0](0, -1, 4) == cplx{1e-3});
  pair.initial.j2 = 40;
  CHECK_THROWS_AS(make_initial_state(pair), ConfigInvalid);
}

TEST_CASE("zero data stays zero and is stable") {
  auto cfg = small_ns();
  cfg.initial.epsilon = 0.0;
  auto r = run_simulation(cfg);
  CHECK(r.outcome == Outcome::Stable);
  for (const auto& row : r.series.rows)
    for (std::size_t c = 0; c < 3; ++c) CHECK(row[c] == 0.0);
  CHECK(r.final_state.fields[0].norm2() == 0.0);
  CHECK(std::isnan(r.decay_rate));
}

TEST_CASE("linearized NS run decays") {
  auto cfg = parse_config(R"({
    "model": {"type": "ns", "nu": 1e-3, "linear": true},
    "grid": {"nx": 16, "ny": 32},
    "initial": {"profile": "single_mode", "k": 1, "j": 0, "epsilon": 1e-2},
    "stepper": {"dt": 0.5}
  })");
  auto r = run_simulation(cfg);
  CHECK(r.outcome == Outcome::Stable);
  CHECK(r.decay_rate > 0.0);
  CHECK(r.series.times.back() == doctest::Approx(50.0));
  for (const char* c : {"R", "T", "Rem", "NLeq"}) CHECK(r.series.value(r.series.size() - 1, c) == 0.0);
}

TEST_CASE("energy CSV, manifest and determinism") {
  auto dir = tmp_dir();
  auto cfg = small_ns();
  cfg.t_end = 6.0;
  cfg.diagnostics.transfer = true;
  cfg.output.energy_csv = (dir / "energy_a.csv").string();
  cfg.output.manifest = (dir / "manifest_a.json").string();
  auto r = run_simulation(cfg);
  auto cfg2 = cfg;
  cfg2.output.energy_csv = (dir / "energy_b.csv").string();
  cfg2.output.manifest.clear();
  run_simulation(cfg2);
  CHECK(slurp(cfg.output.energy_csv) == slurp(cfg2.output.energy_csv));

  auto back = read_energy_csv(cfg.output.energy_csv);
  REQUIRE(back.size() == r.series.size());
  CHECK(back.model == "ns");
  CHECK(back.columns == r.series.columns);
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back.times[i] == r.series.times[i]);
    CHECK(back.rows[i] == r.series.rows[i]);
  }
  double m = 0.0;
  CHECK(classify(back, cfg.classifier, false, &m) == r.outcome);
  CHECK(m == r.max_ratio);
  std::size_t row1 = 0;
  while (back.times[row1] < 1.0) ++row1;
  CHECK(back.times[row1] == 1.0);
  CHECK(back.value(row1, "ratio") == 1.0);
  CHECK(back.value(back.size() - 1, "boot_diss") > 0.0);
  CHECK(back.value(back.size() - 1, "NLeq") + back.value(back.size() - 1, "R") > 0.0);

  auto man = nlohmann::json::parse(slurp(cfg.output.manifest));
  CHECK(man["config_hash"] == config_hash(cfg));
  CHECK(man["seed"] == 7);
  CHECK(man["outcome"] == to_string(r.outcome));
  CHECK(man.contains("fft_backend"));
  CHECK(man.contains("wall_time"));
}

TEST_CASE("classifier") {
  EnergySeries s;
  s.columns = {"ratio", "failed"};
  s.append(0.0, {0.0, 0.0});
  s.append(1.0, {1.0, 0.0});
  s.append(2.0, {3.0, 0.0});
  ClassifierSpec spec;
  double m = 0.0;
  CHECK(classify(s, spec, false, &m) == Outcome::Stable);
  CHECK(m == 3.0);
  CHECK(classify(s, spec, true) == Outcome::Unstable);
  s.append(3.0, {50.0, 0.0});
  CHECK(classify(s, spec, false) == Outcome::Inconclusive);
  s.append(4.0, {101.0, 0.0});
  CHECK(classify(s, spec, false) == Outcome::Unstable);
  EnergySeries f = s;
  f.rows.back() = {2.0, 1.0};
  f.rows[3] = {2.0, 0.0};
  CHECK(classify(f, spec, false) == Outcome::Unstable);
  CHECK(outcome_from_string(to_string(Outcome::Inconclusive)) == Outcome::Inconclusive);
  CHECK_THROWS_AS(outcome_from_string("maybe"), ConfigInvalid);
}

TEST_CASE("failed steps end the run as unstable") {
  auto cfg = small_ns();
  cfg.initial.epsilon = 50.0;
  cfg.stepper.adapt = false;
  cfg.stepper.dt = 0.5;
  auto r = run_simulation(cfg);
  CHECK(r.outcome == Outcome::Unstable);
  CHECK(r.nonfinite);
  CHECK(!r.failure.empty());
  CHECK(r.series.value(r.series.size() - 1, "failed") == 1.0);
  CHECK(r.series.times.back() > r.series.times[r.series.size() - 2]);
}

TEST_CASE("bisection and sweep") {
  auto cfg = small_ns();
  BisectOptions o;
  o.rel_tol = 0.25;
  auto b = bisect_threshold(cfg, 1e-2, o);
  CHECK(std::isfinite(b.eps_star));
  CHECK(b.eps_stable < b.eps_unstable);
  CHECK(b.eps_unstable / b.eps_stable <= 1.25 * (1 + 1e-12));
  // No stable probe above an unstable one.
  for (const auto& a : b.records)
    for (const auto& c : b.records)
      if (a.outcome == Outcome::Stable && c.outcome != Outcome::Stable) CHECK(a.epsilon < c.epsilon);
  for (const auto& rec : b.records) CHECK(rec.seed == 7);

  auto again = bisect_threshold(cfg, 1e-2, o);
  CHECK(again.eps_star == b.eps_star);

  auto par = sweep(cfg, {2e-2, 1e-2}, o, 2);
  REQUIRE(par.size() == 2);
  CHECK(par[0].mu == 2e-2);
  CHECK(par[1].eps_star == b.eps_star);
  CHECK(par[0].eps_star >= par[1].eps_star);

  auto dir = tmp_dir();
  auto path = (dir / "sweep.csv").string();
  write_sweep_csv(path, b.records);
  auto recs = read_sweep_csv(path);
  REQUIRE(recs.size() == b.records.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].epsilon == b.records[i].epsilon);
    CHECK(recs[i].outcome == b.records[i].outcome);
    CHECK(recs[i].max_ratio == b.records[i].max_ratio);
    CHECK(recs[i].seed == b.records[i].seed);
  }
  auto tpath = (dir / "threshold.csv").string();
  write_threshold_csv(tpath, par);
  auto t = read_csv(tpath);
  CHECK(t.header == std::vector<std::string>{"mu", "eps_star", "eps_stable", "eps_unstable", "probes"});
  CHECK(t.number(1, "eps_star") == b.eps_star);

  BisectOptions tight = o;
  tight.max_probes = 1;
  CHECK_THROWS_AS(bisect_threshold(cfg, 1e-2, tight), BracketFailure);
  BisectOptions bad = o;
  bad.expand = 1.0;
  CHECK_THROWS_AS(bisect_threshold(cfg, 1e-2, bad), ConfigInvalid);
}

TEST_CASE("threshold slope fits") {
  std::vector<std::pair<double, double>> pts, logged;
  for (double mu : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2}) {
    pts.emplace_back(mu, std::cbrt(mu));
    logged.emplace_back(mu, std::cbrt(mu) * std::pow(std::fabs(std::log(mu)), -2.0));
  }
  auto f = fit_threshold_slope(pts);
  CHECK(std::fabs(f.slope - 1.0 / 3.0) < 1e-12);
  CHECK(f.stderr_slope < 1e-12);
  CHECK(f.residuals.size() == 5);
  CHECK(fit_threshold_slope(logged).slope > 1.0 / 3.0 + 0.05);
  CHECK(std::fabs(fit_threshold_slope(logged, 1.0).slope - 1.0 / 3.0) < 1e-12);
  std::vector<std::pair<double, double>> two{{1e-3, 0.1}, {1e-3, 0.2}, {1e-2, 0.3}};
  CHECK_THROWS_AS(fit_threshold_slope(two), InsufficientData);

  EchoSweep sw;
  sw.gammas = {1.0};
  std::vector<std::pair<double, double>> echo;
  for (const auto& r : run_echo_sweep(sw)) echo.emplace_back(r.mu, r.eps_star);
  double s = fit_threshold_slope(echo).slope;
  CHECK(s >= 0.28);
  CHECK(s <= 0.38);
}

TEST_CASE("large data grows far more than small data") {
  // Amplitudes are H^N sizes; at N = 12 the nonlinear regime starts between
  // 10 and 300 nu^{1/3}, so the large run sits at the top of that range.
  const double nu = 1e-3;
  auto run = [&](double eps) {
    auto cfg = parse_config(R"({
      "model": {"type": "ns", "nu": 1e-3},
      "grid": {"nx": 64, "ny": 256},
      "initial": {"profile": "random", "seed": 5}
    })");
    cfg.initial.epsilon = eps;
    return run_simulation(cfg);
  };
  auto big = run(300.0 * std::cbrt(nu)), small = run(0.01 * std::cbrt(nu));
  CAPTURE(big.max_ratio);
  CAPTURE(small.max_ratio);
  CHECK(big.max_ratio >= 10.0 * small.max_ratio);
}

TEST_CASE("CSV primitives") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  auto path = (tmp_dir() / "prim.csv").string();
  {
    CsvWriter w(path, {"a", "b", "c"});
    w.row({1.5, 42LL, std::string("x")});
    CHECK_THROWS_AS(w.row({1.0}), ConfigInvalid);
  }
  auto t = read_csv(path);
  CHECK(t.rows.size() == 1);
  CHECK(t.number(0, "a") == 1.5);
  CHECK(t.rows[0][1] == "42");
  CHECK_THROWS_AS(t.column("d"), ConfigInvalid);
  CHECK_THROWS_AS(read_csv((tmp_dir() / "nope.csv").string()), ConfigInvalid);
  CHECK_THROWS_AS(read_energy_csv(path), ConfigInvalid);
}

TEST_CASE("shipped configs load and validate") {
  int seen = 0;
  for (const auto& e : fs::directory_iterator(COUETTE_CONFIG_DIR)) {
    if (e.path().extension() != ".json") continue;
    CAPTURE(e.path().string());
    SimConfig cfg;
    CHECK_NOTHROW(cfg = load_config(e.path().string()));
    CHECK_NOTHROW(cfg.validate());
    CHECK_NOTHROW(parse_config(to_json(cfg)));
    ++seen;
  }
  CHECK(seen >= 5);
}
