#include "couette/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "couette/errors.hpp"

namespace couette {

namespace {

void require_same_grid(const SpectralGrid& a, const SpectralGrid& b) {
  if (!(a == b)) throw NonconformalGrid("field and weight table grids differ");
}

void check_table_time(const WeightTable& table, double t) {
  if (std::fabs(table.t - t) > 1e-12 * std::max(1.0, std::fabs(t)))
    throw TimeMismatch("weight table at t = " + std::to_string(table.t) + ", fields at t = " +
                       std::to_string(t));
}

double time_bracket(double t) { return std::sqrt(1.0 + t * t); }

}  // namespace

std::size_t EnergySeries::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw ConfigInvalid("unknown series column '" + std::string(name) + "'");
}

std::vector<double> EnergySeries::column(std::string_view name) const {
  std::size_t c = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

double EnergySeries::value(std::size_t row, std::string_view name) const {
  return rows.at(row)[column_index(name)];
}

void EnergySeries::append(double t, std::vector<double> row) {
  if (row.size() != columns.size()) throw ConfigInvalid("series row has the wrong width");
  if (!std::isfinite(t)) throw NonfiniteState("non-finite series time");
  if (!times.empty() && !(t > times.back()))
    throw TimeMismatch("series times must increase strictly");
  for (std::size_t i = 0; i < row.size(); ++i)
    if (!std::isfinite(row[i])) throw NonfiniteState("non-finite value in column " + columns[i]);
  times.push_back(t);
  rows.push_back(std::move(row));
}

double energy_boussinesq(const SpectralField& zeta1, const SpectralField& zeta2,
                         const WeightTable& table, double beta) {
  if (!(beta > 0.5)) throw InvalidRichardson("the energy needs beta > 1/2");
  require_same_grid(zeta1.grid(), table.grid);
  require_same_grid(zeta2.grid(), table.grid);
  const auto& g = table.grid;
  double sq = 0.0, cross = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double A = table.A[i];
    cplx a1 = A * zeta1.at(0, i), a2 = A * zeta2.at(0, i);
    sq += std::norm(a1) + std::norm(a2);
    double k = g.k_at(i);
    double q = g.eta_at(i) - k * table.t;
    double lam = std::hypot(k, q);
    if (lam == 0.0) continue;
    // <d_y^t Lambda_t^{-1} A zeta_1, A zeta_2>
    cplx s = cplx{0.0, q / lam} * a1;
    cross += (s * std::conj(a2)).real();
  }
  return 0.5 * sq + cross / (2.0 * beta);
}

double weighted_norm2(const std::vector<SpectralField>& fields, const WeightTable& table) {
  double s = 0.0;
  for (const auto& f : fields) {
    require_same_grid(f.grid(), table.grid);
    for (int c = 0; c < f.components(); ++c)
      for (std::size_t i = 0; i < f.modes(); ++i) s += table.A[i] * table.A[i] * std::norm(f.at(c, i));
  }
  return s;
}

void bootstrap_integrals(BootstrapIntegrals& acc, const std::vector<SpectralField>& fields,
                         double t, const WeightTable& table, double mu) {
  check_table_time(table, t);
  if (acc.started && !(t > acc.t_last))
    throw TimeMismatch("bootstrap samples must advance in time");
  const auto& g = table.grid;
  double diss = 0.0, weight = 0.0;
  for (const auto& f : fields) {
    require_same_grid(f.grid(), g);
    for (int c = 0; c < f.components(); ++c)
      for (std::size_t i = 0; i < f.modes(); ++i) {
        double k = g.k_at(i);
        double q = g.eta_at(i) - k * t;
        double a2 = table.A[i] * table.A[i] * std::norm(f.at(c, i));
        diss += (k * k + q * q) * a2;
        weight += table.dlog_m_dt[i] * a2;
      }
  }
  diss *= mu;
  if (acc.started) {
    double h = t - acc.t_last;
    acc.boot_diss += 0.5 * h * (diss + acc.diss_last);
    acc.boot_weight += 0.5 * h * (weight + acc.weight_last);
  }
  acc.started = true;
  acc.t_last = t;
  acc.diss_last = diss;
  acc.weight_last = weight;
}

DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& norm) {
  if (t.size() != norm.size()) throw ConfigInvalid("time and norm samples differ in length");
  const std::size_t n = t.size();
  if (n < 10) throw InsufficientData("decay fit needs at least 10 samples, got " + std::to_string(n));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(norm[i] > 0.0)) throw NonpositiveNorm("decay fit needs positive norms");
    y[i] = std::log(norm[i]);
  }
  double tm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < n; ++i) tm += t[i], ym += y[i];
  tm /= n;
  ym /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (t[i] - tm) * (t[i] - tm);
    sxy += (t[i] - tm) * (y[i] - ym);
  }
  if (!(sxx > 0.0)) throw InsufficientData("decay fit needs distinct times");
  double slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - ym - slope * (t[i] - tm);
    rss += r * r;
  }
  DecayFit fit;
  fit.rate = -slope;
  fit.stderr_rate = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  fit.samples = n;
  return fit;
}

DecayFit fit_decay_rate(const EnergySeries& series, std::string_view column, double t_lo,
                        double t_hi) {
  std::size_t c = series.column_index(column);
  std::vector<double> t, y;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.times[i] < t_lo || series.times[i] > t_hi) continue;
    t.push_back(series.times[i]);
    y.push_back(series.rows[i][c]);
  }
  return fit_decay_rate(t, y);
}

FrequencySet classify_pair(int k, int j, int l, int i, double eta_unit) {
  const double h2 = eta_unit * eta_unit;
  if (k == l) return FrequencySet::Average;
  // |k-l, eta-xi|^2 - 64 |l, xi|^2 = I + h^2 J with integer I, J.
  const long long dk = k - l, dj = j - i;
  double reaction = static_cast<double>(dk * dk - 64LL * l * l) +
                    h2 * static_cast<double>(dj * dj - 64LL * i * i);
  if (reaction > 0.0) return FrequencySet::Reaction;
  double transport = static_cast<double>(l * 1LL * l - 64LL * dk * dk) +
                     h2 * static_cast<double>(i * 1LL * i - 64LL * dj * dj);
  if (transport > 0.0) return FrequencySet::Transport;
  return FrequencySet::Remainder;
}

TransferDecomposition transfer_decomposition(const SpectralField& f1, const SpectralField& f2,
                                             const SpectralField& q, double gamma,
                                             double gamma_tilde, const WeightTable& table,
                                             double t, const TransferOptions& options) {
  check_table_time(table, t);
  const auto& g = table.grid;
  require_same_grid(f1.grid(), g);
  require_same_grid(f2.grid(), g);
  require_same_grid(q.grid(), g);
  if (!(gamma_tilde >= 0.0 && gamma_tilde <= gamma && gamma <= 1.0))
    throw ConfigInvalid("need 0 <= gamma_tilde <= gamma <= 1");

  const auto modes = g.retained_indices();
  const std::size_t pairs = modes.size() * modes.size();
  if (pairs > options.pair_budget)
    throw GridTooLarge(std::to_string(pairs) + " frequency pairs exceed the budget of " +
                       std::to_string(options.pair_budget));

  const double h = g.eta_unit();
  auto lam = [t](double k, double eta) { return std::hypot(k, eta - k * t); };

  TransferDecomposition out;
  out.pairs = pairs;
  double sum_R = 0.0, sum_T = 0.0, sum_Rem = 0.0, sum_eq = 0.0;
  for (std::size_t a : modes) {
    const int k = g.k_at(a), j = g.j_at(a);
    const double eta = j * h;
    const double af1 = table.A[a] * std::abs(f1.at(0, a));
    if (af1 == 0.0) continue;
    const double lam_k = lam(k, eta);
    for (std::size_t b : modes) {
      const int l = g.k_at(b), i = g.j_at(b);
      const int dk = k - l, dj = j - i;
      if (std::abs(dk) > g.kmax() || std::abs(dj) > g.jmax()) continue;
      const double xi = i * h;
      double num = eta * l - k * xi;
      if (options.lab_frame_perp) num += dk * l * t;
      if (num == 0.0) continue;
      const double lam_d = lam(dk, (j - i) * h);
      if (lam_d == 0.0) continue;
      const double qd = std::abs(q.at(0, g.index(dk, dj)));
      const double fl = std::abs(f2.at(0, b));
      if (qd == 0.0 || fl == 0.0) continue;
      double ratio = 1.0;
      if (gamma_tilde > 0.0) {
        const double lam_l = lam(l, xi);
        if (lam_l == 0.0) continue;
        ratio = std::pow(lam_k / lam_l, gamma_tilde);
      }
      const double comm = std::fabs(ratio * table.A[a] - table.A[b]);
      const double term = std::fabs(num) / std::pow(lam_d, 1.0 + gamma) * comm * af1 * fl * qd;

      switch (classify_pair(k, j, l, i, h)) {
        case FrequencySet::Reaction: {
          sum_R += term;
          const double ratio_res = dk != 0 ? (dj * h) / dk : 0.0;
          bool resonant = dk != 0 && ratio_res >= 0.5 * t && ratio_res <= 2.0 * t;
          (resonant ? out.R_resonant : out.R_nonresonant) += term;
          break;
        }
        case FrequencySet::Transport: sum_T += term; break;
        case FrequencySet::Remainder: sum_Rem += term; break;
        case FrequencySet::Average: {
          sum_eq += term;
          const double d2 = h * h * static_cast<double>(dj) * dj;
          const double kx2 = static_cast<double>(k) * k + h * h * static_cast<double>(i) * i;
          (d2 >= kx2 ? out.NLeq_R : out.NLeq_T) += term;
          break;
        }
      }
      out.total += term;
    }
  }
  out.R = sum_R;
  out.T = sum_T;
  out.Rem = sum_Rem;
  out.NLeq = sum_eq;
  return out;
}

DampingRecord damping_norms(const ModelSpec& spec, const State& state) {
  const double bt = time_bracket(state.t);
  DampingRecord r;
  switch (spec.model) {
    case ModelKind::NavierStokes: {
      auto v = velocity_from_vorticity(state.fields.at(0), state.t);
      r.x_part = bt * std::sqrt(v.norm2_nonzero_k(0));
      r.y_part = bt * bt * std::sqrt(v.norm2(1));
      break;
    }
    case ModelKind::Boussinesq: {
      auto v = velocity_from_vorticity(state.fields.at(0), state.t);
      r.x_part = std::sqrt(bt) * std::sqrt(v.norm2_nonzero_k(0) + state.fields.at(1).norm2_nonzero_k(0));
      r.y_part = std::pow(bt, 1.5) * std::sqrt(v.norm2(1));
      break;
    }
    default: {
      const auto& v = state.fields.at(0);
      const auto& b = state.fields.at(1);
      r.x_part = std::sqrt(v.norm2_nonzero_k(0) + b.norm2_nonzero_k(0));
      r.y_part = bt * std::sqrt(v.norm2(1) + b.norm2(1));
      break;
    }
  }
  r.total = r.x_part + r.y_part;
  return r;
}

}  // namespace couette
