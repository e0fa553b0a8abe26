#include "couette/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "couette/errors.hpp"

namespace couette {

namespace {

constexpr cplx kI{0.0, 1.0};

// FFTW's planner is not thread safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPlans {
 public:
  FftPlans(int nx, int ny) : nx_(nx), ny_(ny) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    std::size_t n = static_cast<std::size_t>(nx) * ny;
    auto* a = fftw_alloc_complex(n);
    auto* b = fftw_alloc_complex(n);
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_2d(nx, ny, a, b, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_2d(nx, ny, a, b, FFTW_BACKWARD, flags);
    fftw_free(a);
    fftw_free(b);
  }
  ~FftPlans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  void forward(const cplx* in, cplx* out) const {
    fftw_execute_dft(forward_, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }
  void backward(const cplx* in, cplx* out) const {
    fftw_execute_dft(backward_, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }

 private:
  int nx_, ny_;
  fftw_plan forward_;
  fftw_plan backward_;
};

// Per-thread plan cache keyed by grid shape.
const FftPlans& plans_for(const SpectralGrid& grid) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<FftPlans>> cache;
  auto key = std::make_pair(grid.nx(), grid.ny());
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<FftPlans>(grid.nx(), grid.ny())).first;
  return *it->second;
}

void require_same_grid(const SpectralGrid& a, const SpectralGrid& b) {
  if (!(a == b)) throw NonconformalGrid("fields live on different grids");
}

}  // namespace

SpectralGrid::SpectralGrid(int nx, int ny, double ly, double dealias_fraction)
    : nx_(nx), ny_(ny), ly_(ly), dealias_(dealias_fraction) {
  if (nx < 8 || ny < 8 || nx % 2 != 0 || ny % 2 != 0)
    throw ConfigInvalid("grid sizes must be even and >= 8");
  if (!(ly > 0.0) || !std::isfinite(ly)) throw ConfigInvalid("ly must be positive");
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
    throw ConfigInvalid("dealias_fraction must lie in (0, 1]");
  // Largest integer strictly below fraction * n / 2; for fraction <= 2/3 this
  // gives 3 * kmax < n so quadratic products do not alias.
  kmax_ = static_cast<int>(std::ceil(dealias_fraction * nx / 2.0)) - 1;
  jmax_ = static_cast<int>(std::ceil(dealias_fraction * ny / 2.0)) - 1;
  kmax_ = std::max(kmax_, 0);
  jmax_ = std::max(jmax_, 0);
}

std::size_t SpectralGrid::index(int k, int j) const {
  if (k < -nx_ / 2 || k > nx_ / 2 || j < -ny_ / 2 || j > ny_ / 2)
    throw NonconformalGrid("wavenumber outside grid");
  int ix = (k % nx_ + nx_) % nx_;
  int iy = (j % ny_ + ny_) % ny_;
  return static_cast<std::size_t>(ix) * ny_ + iy;
}

std::vector<std::size_t> SpectralGrid::retained_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (retained(i)) out.push_back(i);
  return out;
}

SpectralField::SpectralField(const SpectralGrid& grid, int components)
    : grid_(grid), components_(components), coeffs_(grid.size() * components) {
  if (components != 1 && components != 2)
    throw ConfigInvalid("fields have 1 or 2 components");
}

SpectralField SpectralField::single_mode(const SpectralGrid& grid, int k, int j, cplx amplitude,
                                         int components, int component) {
  SpectralField f(grid, components);
  std::size_t idx = grid.index(k, j);
  std::size_t cdx = grid.conjugate_index(idx);
  if (idx == cdx) {
    f.at(component, idx) = amplitude.real();
  } else {
    f.at(component, idx) = amplitude;
    f.at(component, cdx) = std::conj(amplitude);
  }
  return f;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_grid(grid_, o.grid_);
  if (components_ != o.components_) throw NonconformalGrid("component count mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_grid(grid_, o.grid_);
  if (components_ != o.components_) throw NonconformalGrid("component count mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(cplx a) {
  for (auto& c : coeffs_) c *= a;
  return *this;
}

SpectralField& SpectralField::axpy(cplx a, const SpectralField& x) {
  require_same_grid(grid_, x.grid_);
  if (components_ != x.components_) throw NonconformalGrid("component count mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * x.coeffs_[i];
  return *this;
}

double SpectralField::norm2() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::norm(c);
  return s;
}

double SpectralField::norm2(int c) const {
  double s = 0.0;
  for (const auto& v : component(c)) s += std::norm(v);
  return s;
}

double SpectralField::norm2_nonzero_k(int c) const {
  double s = 0.0;
  auto comp = component(c);
  for (std::size_t i = static_cast<std::size_t>(grid_.ny()); i < modes(); ++i) s += std::norm(comp[i]);
  return s;
}

void SpectralField::set_zero() { std::fill(coeffs_.begin(), coeffs_.end(), cplx{}); }

void SpectralField::truncate() {
  for (std::size_t i = 0; i < modes(); ++i)
    if (!grid_.retained(i))
      for (int c = 0; c < components_; ++c) at(c, i) = 0.0;
}

void SpectralField::symmetrize() {
  for (int c = 0; c < components_; ++c) {
    auto comp = component(c);
    for (std::size_t i = 0; i < modes(); ++i) {
      std::size_t j = grid_.conjugate_index(i);
      if (j < i) continue;
      if (j == i) {
        comp[i] = comp[i].real();
      } else {
        cplx avg = 0.5 * (comp[i] + std::conj(comp[j]));
        comp[i] = avg;
        comp[j] = std::conj(avg);
      }
    }
  }
}

double SpectralField::hermitian_defect() const {
  double d = 0.0;
  for (int c = 0; c < components_; ++c) {
    auto comp = component(c);
    for (std::size_t i = 0; i < modes(); ++i)
      d = std::max(d, std::abs(comp[i] - std::conj(comp[grid_.conjugate_index(i)])));
  }
  return d;
}

bool SpectralField::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

SpectralField SpectralField::extract(int c) const {
  SpectralField out(grid_, 1);
  std::copy(component(c).begin(), component(c).end(), out.component(0).begin());
  return out;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(cplx s, SpectralField a) { return a *= s; }

ShearedSymbols make_sheared_symbols(const SpectralGrid& grid, double t) {
  ShearedSymbols s;
  s.t = t;
  std::size_t n = grid.size();
  s.k.resize(n);
  s.q.resize(n);
  s.lambda.resize(n);
  s.laplacian.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double k = grid.k_at(i);
    double q = grid.eta_at(i) - k * t;
    s.k[i] = k;
    s.q[i] = q;
    s.laplacian[i] = -(k * k + q * q);
    s.lambda[i] = std::hypot(k, q);
  }
  return s;
}

Multiplier lambda_power_symbol(const SpectralGrid& grid, double t, double a) {
  Multiplier m{grid, std::vector<cplx>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double k = grid.k_at(i);
    double lam = std::hypot(k, grid.eta_at(i) - k * t);
    if (lam == 0.0)
      m.values[i] = a == 0.0 ? 1.0 : (a > 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN());
    else
      m.values[i] = std::pow(lam, a);
  }
  return m;
}

SpectralField apply_multiplier(const SpectralField& f, const Multiplier& m) {
  require_same_grid(f.grid(), m.grid);
  if (m.values.size() != f.modes()) throw NonconformalGrid("symbol size mismatch");
  SpectralField out(f.grid(), f.components());
  for (int c = 0; c < f.components(); ++c) {
    auto in = f.component(c);
    auto o = out.component(c);
    for (std::size_t i = 0; i < f.modes(); ++i) {
      cplx s = m.values[i];
      if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
        if (in[i] != cplx{})
          throw SingularSymbolAtZeroMode("undefined symbol applied to a nonzero coefficient");
        o[i] = 0.0;
      } else {
        o[i] = s * in[i];
      }
    }
  }
  return out;
}

SpectralField lambda_power(const SpectralField& f, double t, double a) {
  return apply_multiplier(f, lambda_power_symbol(f.grid(), t, a));
}

SpectralField dx(const SpectralField& f) {
  SpectralField out(f.grid(), f.components());
  for (int c = 0; c < f.components(); ++c)
    for (std::size_t i = 0; i < f.modes(); ++i)
      out.at(c, i) = kI * static_cast<double>(f.grid().k_at(i)) * f.at(c, i);
  return out;
}

SpectralField dy_t(const SpectralField& f, double t) {
  SpectralField out(f.grid(), f.components());
  const auto& g = f.grid();
  for (int c = 0; c < f.components(); ++c)
    for (std::size_t i = 0; i < f.modes(); ++i)
      out.at(c, i) = kI * (g.eta_at(i) - g.k_at(i) * t) * f.at(c, i);
  return out;
}

SpectralField grad_t(const SpectralField& scalar, double t) {
  if (scalar.components() != 1) throw NonconformalGrid("gradient of a scalar field");
  const auto& g = scalar.grid();
  SpectralField out(g, 2);
  for (std::size_t i = 0; i < scalar.modes(); ++i) {
    out.at(0, i) = kI * static_cast<double>(g.k_at(i)) * scalar.at(0, i);
    out.at(1, i) = kI * (g.eta_at(i) - g.k_at(i) * t) * scalar.at(0, i);
  }
  return out;
}

SpectralField perp_grad_t(const SpectralField& scalar, double t) {
  if (scalar.components() != 1) throw NonconformalGrid("perpendicular gradient of a scalar field");
  const auto& g = scalar.grid();
  SpectralField out(g, 2);
  for (std::size_t i = 0; i < scalar.modes(); ++i) {
    out.at(0, i) = -kI * (g.eta_at(i) - g.k_at(i) * t) * scalar.at(0, i);
    out.at(1, i) = kI * static_cast<double>(g.k_at(i)) * scalar.at(0, i);
  }
  return out;
}

SpectralField perp_grad(const SpectralField& scalar) { return perp_grad_t(scalar, 0.0); }

SpectralField div_t(const SpectralField& vec, double t) {
  if (vec.components() != 2) throw NonconformalGrid("divergence of a vector field");
  const auto& g = vec.grid();
  SpectralField out(g, 1);
  for (std::size_t i = 0; i < vec.modes(); ++i)
    out.at(0, i) = kI * static_cast<double>(g.k_at(i)) * vec.at(0, i) +
                   kI * (g.eta_at(i) - g.k_at(i) * t) * vec.at(1, i);
  return out;
}

SpectralField curl_t(const SpectralField& vec, double t) {
  if (vec.components() != 2) throw NonconformalGrid("curl of a vector field");
  const auto& g = vec.grid();
  SpectralField out(g, 1);
  for (std::size_t i = 0; i < vec.modes(); ++i)
    out.at(0, i) = -kI * (g.eta_at(i) - g.k_at(i) * t) * vec.at(0, i) +
                   kI * static_cast<double>(g.k_at(i)) * vec.at(1, i);
  return out;
}

std::vector<double> to_physical(const SpectralGrid& grid, std::span<const cplx> coeffs) {
  if (coeffs.size() != grid.size()) throw NonconformalGrid("coefficient count mismatch");
  std::vector<cplx> work(grid.size());
  plans_for(grid).backward(coeffs.data(), work.data());
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = work[i].real();
  return out;
}

std::vector<double> to_physical(const SpectralField& f, int component) {
  return to_physical(f.grid(), f.component(component));
}

SpectralField from_physical(const SpectralGrid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw NonconformalGrid("grid value count mismatch");
  std::vector<cplx> in(values.begin(), values.end());
  SpectralField out(grid, 1);
  plans_for(grid).forward(in.data(), out.component(0).data());
  double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& c : out.component(0)) c *= scale;
  out.truncate();
  out.symmetrize();
  return out;
}

SpectralField physical_product(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid());
  int nc = std::max(f.components(), g.components());
  if (f.components() != g.components() && f.components() != 1 && g.components() != 1)
    throw NonconformalGrid("component count mismatch");
  SpectralField out(f.grid(), nc);
  std::vector<double> pf, pg;
  std::vector<double> prod(f.modes());
  for (int c = 0; c < nc; ++c) {
    if (c == 0 || f.components() > 1) pf = to_physical(f, f.components() > 1 ? c : 0);
    if (c == 0 || g.components() > 1) pg = to_physical(g, g.components() > 1 ? c : 0);
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = pf[i] * pg[i];
    auto part = from_physical(f.grid(), prod);
    std::copy(part.component(0).begin(), part.component(0).end(), out.component(c).begin());
  }
  return out;
}

SpectralField leray_project(const SpectralField& v, double t) {
  if (v.components() != 2) throw NonconformalGrid("projection of a vector field");
  const auto& g = v.grid();
  SpectralField out(g, 2);
  for (std::size_t i = 0; i < v.modes(); ++i) {
    double k = g.k_at(i);
    double q = g.eta_at(i) - k * t;
    double l2 = k * k + q * q;
    cplx vx = v.at(0, i), vy = v.at(1, i);
    if (l2 == 0.0) {
      out.at(0, i) = vx;
      out.at(1, i) = vy;
      continue;
    }
    cplx pv = (k * vx + q * vy) / l2;
    out.at(0, i) = vx - k * pv;
    out.at(1, i) = vy - q * pv;
  }
  return out;
}

double max_abs_div_t(const SpectralField& v, double t) {
  auto d = div_t(v, t);
  double m = 0.0;
  for (const auto& c : d.component(0)) m = std::max(m, std::abs(c));
  return m;
}

std::string fft_backend_version() { return fftw_version; }

}  // namespace couette
