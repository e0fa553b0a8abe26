#include "couette/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <random>
#include <thread>

#include "couette/csv.hpp"
#include "couette/errors.hpp"
#include "couette/stepper.hpp"
#include "json.hpp"

namespace couette {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Platform-independent normal deviates from the standardized mt19937_64.
class Normal {
 public:
  explicit Normal(std::uint64_t seed) : eng_(seed) {}
  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  // (0, 1]
  double uniform() { return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53; }
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

double sobolev_weight(const SpectralGrid& g, std::size_t i, int N) {
  double k = g.k_at(i), eta = g.eta_at(i);
  return std::pow(1.0 + k * k + eta * eta, N);
}

SpectralField random_scalar(const SpectralGrid& g, const InitialSpec& in, int N, Normal& rng) {
  SpectralField f(g, 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    int k = g.k_at(i), j = g.j_at(i);
    if (!g.retained(i) || std::abs(k) > in.band_k || std::abs(j) > in.band_j) continue;
    std::size_t c = g.conjugate_index(i);
    if (c <= i) continue;  // each conjugate pair drawn once; (0,0) skipped
    double env = 1.0 / std::sqrt(sobolev_weight(g, i, N));
    cplx z{rng(), rng()};
    f.at(0, i) = env * z;
    f.at(0, c) = std::conj(env * z);
  }
  return f;
}

double sobolev_norm2(const std::vector<SpectralField>& fields, int N) {
  double s = 0.0;
  for (const auto& f : fields)
    for (int c = 0; c < f.components(); ++c)
      for (std::size_t i = 0; i < f.modes(); ++i)
        s += sobolev_weight(f.grid(), i, N) * std::norm(f.at(c, i));
  return s;
}

SpectralField seeded_scalar(const SpectralGrid& g, int k, int j, double amp) {
  if (k == 0 && j == 0) throw ConfigInvalid("seeded modes must differ from (0,0)");
  if (std::abs(k) > g.kmax() || std::abs(j) > g.jmax())
    throw ConfigInvalid("seeded mode (" + std::to_string(k) + ", " + std::to_string(j) +
                        ") lies outside the retained band");
  return SpectralField::single_mode(g, k, j, amp);
}

double resolved_ratio(double e, double e1) { return e1 > 0.0 ? e / e1 : 0.0; }

struct Diagnoser {
  const SimConfig& cfg;
  WeightModel wmodel;
  std::vector<std::string> names;
  BootstrapIntegrals boot;
  double e_ref = -1.0;

  std::vector<std::string> columns() const {
    std::vector<std::string> c;
    for (const auto& n : names) {
      c.push_back("l2_" + n);
      c.push_back("l2_" + n + "_neq");
      c.push_back("A_" + n);
    }
    for (const char* s : {"E", "ratio", "boot_diss", "boot_weight", "R", "T", "Rem", "NLeq",
                          "damp_x", "damp_y", "damp", "failed"})
      c.emplace_back(s);
    return c;
  }

  std::vector<double> record(const State& s, bool failed) {
    const auto& spec = cfg.model;
    auto table = WeightTable::build(s.fields[0].grid(), cfg.weights, wmodel, s.t);
    std::vector<double> row;
    for (const auto& f : s.fields) {
      double l2 = f.norm2(), neq = 0.0;
      for (int c = 0; c < f.components(); ++c) neq += f.norm2_nonzero_k(c);
      row.push_back(std::sqrt(l2));
      row.push_back(std::sqrt(neq));
      row.push_back(std::sqrt(weighted_norm2({f}, table)));
    }

    std::vector<SpectralField> boot_fields;
    double E = 0.0;
    TransferDecomposition tr;
    TransferOptions topt{cfg.diagnostics.transfer_pair_budget, cfg.diagnostics.transfer_lab_frame_perp};
    const double g = cfg.weights.gamma, gt = cfg.weights.gamma_tilde;
    auto add_transfer = [&](const SpectralField& f, const SpectralField& q) {
      for (int c = 0; c < f.components(); ++c) {
        auto fc = f.extract(c);
        auto d = transfer_decomposition(fc, fc, q, g, gt, table, s.t, topt);
        tr.R += d.R, tr.T += d.T, tr.Rem += d.Rem, tr.NLeq += d.NLeq;
      }
    };
    switch (spec.model) {
      case ModelKind::NavierStokes:
        E = weighted_norm2({s.fields[0]}, table);
        boot_fields = {s.fields[0]};
        if (cfg.diagnostics.transfer) add_transfer(s.fields[0], s.fields[0]);
        break;
      case ModelKind::Boussinesq: {
        auto [z1, z2] = adapted_boussinesq(s.fields[0], s.fields[1], s.t, spec.beta);
        E = energy_boussinesq(z1, z2, table, spec.beta);
        if (cfg.diagnostics.transfer) add_transfer(z2, z1);
        boot_fields = {std::move(z1), std::move(z2)};
        break;
      }
      default: {
        auto [vt, bt] = adapted_mhd(s.fields[0], s.fields[1], s.t, spec);
        E = weighted_norm2({vt, bt}, table);
        if (cfg.diagnostics.transfer) {
          auto q = lambda_power(curl_t(s.fields[0], s.t), s.t, -1.0);
          add_transfer(s.fields[0], q);
          add_transfer(s.fields[1], q);
        }
        boot_fields = {std::move(vt), std::move(bt)};
        break;
      }
    }
    if (!failed) bootstrap_integrals(boot, boot_fields, s.t, table, cfg.weights.mu);
    if (e_ref < 0.0 && s.t >= 1.0) e_ref = E;
    double ratio = e_ref >= 0.0 ? resolved_ratio(E, e_ref) : 0.0;
    auto damp = damping_norms(spec, s);
    for (double v : {E, ratio, boot.boot_diss, boot.boot_weight, tr.R, tr.T, tr.Rem, tr.NLeq,
                     damp.x_part, damp.y_part, damp.total, failed ? 1.0 : 0.0})
      row.push_back(v);
    return row;
  }
};

std::vector<double> diagnostic_times(double cadence, double t_end) {
  std::vector<double> t{0.0, 1.0};
  for (long n = 1;; ++n) {
    double tn = n * cadence;
    if (tn >= t_end) break;
    t.push_back(tn);
  }
  t.push_back(t_end);
  std::sort(t.begin(), t.end());
  std::vector<double> out;
  for (double x : t)
    if (x <= t_end && (out.empty() || x - out.back() > 1e-9 * std::max(1.0, x))) out.push_back(x);
  return out;
}

SweepRecord to_record(const SimConfig& cfg, const SimulationResult& r) {
  return {cfg.mu(), cfg.initial.epsilon, r.outcome, r.max_ratio, r.final_ratio,
          r.decay_rate, r.wall_time, cfg.initial.seed};
}

std::string probe_path(const std::string& base, double mu, double eps) {
  if (base.empty()) return {};
  std::string stem = base;
  if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".csv") stem.resize(stem.size() - 4);
  char buf[64];
  std::snprintf(buf, sizeof buf, "_mu%.6g_eps%.6g.csv", mu, eps);
  return stem + buf;
}

}  // namespace

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Stable: return "stable";
    case Outcome::Unstable: return "unstable";
    case Outcome::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Outcome outcome_from_string(const std::string& s) {
  if (s == "stable") return Outcome::Stable;
  if (s == "unstable") return Outcome::Unstable;
  if (s == "inconclusive") return Outcome::Inconclusive;
  throw ConfigInvalid("unknown outcome '" + s + "'");
}

State make_initial_state(const SimConfig& cfg) {
  const auto grid = cfg.grid.make();
  const auto& in = cfg.initial;
  const int N = cfg.weights.N;
  State s = make_zero_state(cfg.model, grid, 0.0);
  const bool mhd = cfg.model.model == ModelKind::MhdHorizontal || cfg.model.model == ModelKind::MhdVertical;
  // MHD fields come from stream functions so that div = 0 at t = 0.
  auto lift = [&](SpectralField scalar) { return mhd ? perp_grad(scalar) : scalar; };

  if (in.profile == InitialProfile::Random) {
    Normal rng(in.seed);
    for (auto& f : s.fields) f = lift(random_scalar(grid, in, N, rng));
    double n2 = sobolev_norm2(s.fields, N);
    if (n2 > 0.0)
      for (auto& f : s.fields) f *= in.epsilon / std::sqrt(n2);
    return s;
  }
  SpectralField seed = seeded_scalar(grid, in.k, in.j, in.epsilon);
  if (in.profile == InitialProfile::EchoPair) seed += seeded_scalar(grid, in.k2, in.j2, in.epsilon);
  s.fields[0] = lift(std::move(seed));
  return s;
}

Outcome classify(const EnergySeries& series, const ClassifierSpec& spec, bool nonfinite,
                 double* max_ratio) {
  std::size_t rc = series.column_index("ratio");
  std::size_t fc = series.column_index("failed");
  double m = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.times[i] < 1.0) continue;
    m = std::max(m, series.rows[i][rc]);
    if (series.rows[i][fc] != 0.0) nonfinite = true;
  }
  if (max_ratio) *max_ratio = m;
  if (nonfinite || m > spec.g_unstable) return Outcome::Unstable;
  if (m <= spec.g_stable) return Outcome::Stable;
  return Outcome::Inconclusive;
}

SimulationResult run_simulation(const SimConfig& cfg) {
  const auto wall0 = std::chrono::steady_clock::now();
  cfg.validate();
  SimulationResult res;
  const double t_end = cfg.resolved_t_end();
  StepperConfig step_cfg = cfg.stepper;
  step_cfg.t_end = t_end;

  Diagnoser diag{cfg, weight_model_of(cfg.model.model), cfg.model.field_names(), {}, -1.0};
  res.series.model = to_string(cfg.model.model);
  res.series.columns = diag.columns();

  CsvWriter csv;
  if (!cfg.output.energy_csv.empty()) {
    std::vector<std::string> header{"t", "model"};
    header.insert(header.end(), res.series.columns.begin(), res.series.columns.end());
    csv = CsvWriter(cfg.output.energy_csv, header);
  }
  auto emit = [&](const State& s, bool failed, double t_row) {
    auto row = diag.record(s, failed);
    res.series.append(t_row, row);
    if (csv.is_open()) {
      std::vector<CsvCell> cells{t_row, res.series.model};
      for (double v : row) cells.emplace_back(v);
      csv.row(cells);
      csv.flush();
    }
    return row;
  };

  State state = make_initial_state(cfg);
  const auto times = diagnostic_times(cfg.diagnostics.cadence, t_end);
  emit(state, false, 0.0);
  const std::size_t ratio_col = res.series.column_index("ratio");
  bool stop = false;
  for (std::size_t n = 1; n < times.size() && !stop; ++n) {
    const double target = times[n];
    while (state.t < target) {
      double cap = target - state.t;
      double h_try = cfg.stepper.dt;
      try {
        auto r = step(state, cfg.model, step_cfg, cap);
        h_try = r.dt_used;
        state = std::move(r.state);
        if (r.dt_used >= cap) state.t = target;
        ++res.steps;
      } catch (const NonfiniteState& e) {
        res.nonfinite = true;
        res.failure = e.what();
      } catch (const CflViolation& e) {
        res.nonfinite = true;
        res.failure = e.what();
      }
      if (res.nonfinite) {
        // The failure row carries the last finite state, stamped at the
        // attempted time.
        double t_fail = std::max(state.t + std::min(h_try, cap), std::nextafter(res.series.times.back(), 1e300));
        emit(state, true, t_fail);
        stop = true;
        break;
      }
    }
    if (stop) break;
    auto row = emit(state, false, target);
    if (target >= 1.0 && row[ratio_col] > cfg.classifier.g_unstable) stop = true;
  }

  res.outcome = classify(res.series, cfg.classifier, res.nonfinite, &res.max_ratio);
  for (std::size_t i = res.series.size(); i-- > 0;)
    if (res.series.times[i] >= 1.0) {
      res.final_ratio = res.series.rows[i][ratio_col];
      break;
    }
  try {
    double t_lo = cfg.diagnostics.transient_fraction / std::cbrt(cfg.mu());
    res.decay_rate = fit_decay_rate(res.series, "l2_" + diag.names[0] + "_neq", t_lo, t_end).rate;
  } catch (const Error&) {
    res.decay_rate = kNaN;
  }
  res.final_state = std::move(state);
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  if (!cfg.output.manifest.empty()) write_manifest(cfg.output.manifest, cfg, res);
  return res;
}

BisectResult bisect_threshold(const SimConfig& tmpl, double mu, const BisectOptions& o) {
  if (!(o.eps_min > 0.0 && o.eps_max > o.eps_min && o.expand > 1.0 && o.rel_tol > 0.0))
    throw ConfigInvalid("invalid bisection options");
  SimConfig cfg = tmpl;
  cfg.set_mu(mu);
  cfg.validate();
  BisectResult out;
  out.mu = mu;
  auto probe = [&](double eps) {
    if (static_cast<int>(out.records.size()) >= o.max_probes)
      throw BracketFailure("probe budget exhausted at mu = " + std::to_string(mu));
    SimConfig c = cfg;
    c.initial.epsilon = eps;
    c.output.energy_csv = probe_path(tmpl.output.energy_csv, mu, eps);
    c.output.manifest.clear();
    auto r = run_simulation(c);
    out.records.push_back(to_record(c, r));
    return r.outcome == Outcome::Stable;
  };

  double eps = std::clamp(o.guess_factor * std::cbrt(mu), o.eps_min, o.eps_max);
  double lo = 0.0, hi = 0.0;
  if (probe(eps)) {
    lo = eps;
    while (true) {
      eps *= o.expand;
      if (eps > o.eps_max) throw BracketFailure("no unstable probe below eps_max at mu = " + std::to_string(mu));
      if (!probe(eps)) {
        hi = eps;
        break;
      }
      lo = eps;
    }
  } else {
    hi = eps;
    while (true) {
      eps /= o.expand;
      if (eps < o.eps_min) throw BracketFailure("no stable probe above eps_min at mu = " + std::to_string(mu));
      if (probe(eps)) {
        lo = eps;
        break;
      }
      hi = eps;
    }
  }
  while (hi / lo > 1.0 + o.rel_tol) {
    double mid = std::sqrt(lo * hi);
    (probe(mid) ? lo : hi) = mid;
  }
  out.eps_stable = lo;
  out.eps_unstable = hi;
  out.eps_star = std::sqrt(lo * hi);
  return out;
}

std::vector<BisectResult> sweep(const SimConfig& tmpl, const std::vector<double>& mu_grid,
                                const BisectOptions& options, int jobs) {
  std::vector<BisectResult> results(mu_grid.size());
  std::vector<std::exception_ptr> errors(mu_grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < mu_grid.size();) {
      try {
        results[i] = bisect_threshold(tmpl, mu_grid[i], options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(mu_grid.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

SlopeFit fit_threshold_slope(const std::vector<std::pair<double, double>>& mu_eps,
                             std::optional<double> log_r) {
  std::vector<double> x, y;
  for (auto [mu, eps] : mu_eps) {
    if (!(mu > 0.0 && mu < 1.0 && eps > 0.0 && std::isfinite(eps))) continue;
    x.push_back(std::log(mu));
    double v = eps;
    if (log_r) v *= std::pow(std::fabs(std::log(mu)), 1.0 + *log_r);
    y.push_back(std::log(v));
  }
  std::vector<double> distinct = x;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) throw InsufficientData("slope fit needs at least 3 distinct mu values");
  const double n = static_cast<double>(x.size());
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) xm += x[i], ym += y[i];
  xm /= n;
  ym /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * xm;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - f.intercept - f.slope * x[i];
    f.residuals.push_back(r);
    rss += r * r;
  }
  f.stderr_slope = std::sqrt(rss / (n - 2.0) / sxx);
  return f;
}

SlopeFit fit_threshold_slope(const std::vector<BisectResult>& results, std::optional<double> log_r) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : results) pts.emplace_back(r.mu, r.eps_star);
  return fit_threshold_slope(pts, log_r);
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& records) {
  CsvWriter w(path, {"mu", "epsilon", "outcome", "max_ratio", "final_ratio", "decay_rate", "wall_time", "seed"});
  for (const auto& r : records)
    w.row({r.mu, r.epsilon, to_string(r.outcome), r.max_ratio, r.final_ratio, r.decay_rate, r.wall_time,
           static_cast<long long>(r.seed)});
}

std::vector<SweepRecord> read_sweep_csv(const std::string& path) {
  auto t = read_csv(path);
  std::vector<SweepRecord> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    SweepRecord r;
    r.mu = t.number(i, "mu");
    r.epsilon = t.number(i, "epsilon");
    r.outcome = outcome_from_string(t.rows[i][t.column("outcome")]);
    r.max_ratio = t.number(i, "max_ratio");
    r.final_ratio = t.number(i, "final_ratio");
    r.decay_rate = t.number(i, "decay_rate");
    r.wall_time = t.number(i, "wall_time");
    r.seed = std::stoull(t.rows[i][t.column("seed")]);
    out.push_back(r);
  }
  return out;
}

void write_threshold_csv(const std::string& path, const std::vector<BisectResult>& results) {
  CsvWriter w(path, {"mu", "eps_star", "eps_stable", "eps_unstable", "probes"});
  for (const auto& r : results)
    w.row({r.mu, r.eps_star, r.eps_stable, r.eps_unstable, static_cast<long long>(r.records.size())});
}

void write_energy_csv(const std::string& path, const EnergySeries& s) {
  std::vector<std::string> header{"t", "model"};
  header.insert(header.end(), s.columns.begin(), s.columns.end());
  CsvWriter w(path, header);
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::vector<CsvCell> cells{s.times[i], s.model};
    for (double v : s.rows[i]) cells.emplace_back(v);
    w.row(cells);
  }
}

EnergySeries read_energy_csv(const std::string& path) {
  auto t = read_csv(path);
  if (t.header.size() < 2 || t.header[0] != "t" || t.header[1] != "model")
    throw ConfigInvalid("'" + path + "' is not an energy CSV");
  EnergySeries s;
  s.columns.assign(t.header.begin() + 2, t.header.end());
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) throw ConfigInvalid("ragged energy CSV row");
    s.model = row[1];
    std::vector<double> v;
    for (std::size_t c = 2; c < row.size(); ++c) v.push_back(std::stod(row[c]));
    s.append(std::stod(row[0]), std::move(v));
  }
  return s;
}

void write_manifest(const std::string& path, const SimConfig& cfg, const SimulationResult& r) {
  nlohmann::json m;
  m["config_hash"] = config_hash(cfg);
  m["seed"] = cfg.initial.seed;
  m["version"] = library_version();
  m["fft_backend"] = fft_backend_version();
  m["wall_time"] = r.wall_time;
  m["steps"] = r.steps;
  m["outcome"] = to_string(r.outcome);
  m["max_ratio"] = r.max_ratio;
  m["failure"] = r.failure;
  m["config"] = nlohmann::json::parse(to_json(cfg));
  std::ofstream out(path);
  if (!out) throw ConfigInvalid("cannot open '" + path + "' for writing");
  out << m.dump(2) << '\n';
}

std::string library_version() { return "0.1.0"; }

}  // namespace couette
