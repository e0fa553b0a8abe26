#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace couette {

using cplx = std::complex<double>;

// Truncated Fourier lattice for T x (ly T). Coefficients are stored in FFT
// index order, x-index major: idx = ix * ny + iy.
class SpectralGrid {
 public:
  SpectralGrid() : SpectralGrid(8, 8) {}
  SpectralGrid(int nx, int ny, double ly = 4.0 * std::numbers::pi,
               double dealias_fraction = 2.0 / 3.0);

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double ly() const noexcept { return ly_; }
  double dealias_fraction() const noexcept { return dealias_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }

  // Largest retained |k| and |j| (eta = j * eta_unit).
  int kmax() const noexcept { return kmax_; }
  int jmax() const noexcept { return jmax_; }
  double eta_unit() const noexcept { return 2.0 * std::numbers::pi / ly_; }
  double eta_max() const noexcept { return jmax_ * eta_unit(); }

  int k_at(std::size_t idx) const noexcept {
    int ix = static_cast<int>(idx / ny_);
    return ix < nx_ / 2 ? ix : ix - nx_;
  }
  int j_at(std::size_t idx) const noexcept {
    int iy = static_cast<int>(idx % ny_);
    return iy < ny_ / 2 ? iy : iy - ny_;
  }
  double eta_at(std::size_t idx) const noexcept { return j_at(idx) * eta_unit(); }

  // Index of the signed wavenumber pair (k, j); requires |k| <= nx/2, |j| <= ny/2.
  std::size_t index(int k, int j) const;
  std::size_t conjugate_index(std::size_t idx) const noexcept {
    std::size_t ix = idx / ny_, iy = idx % ny_;
    return ((nx_ - ix) % nx_) * ny_ + (ny_ - iy) % ny_;
  }
  bool retained(std::size_t idx) const noexcept {
    int k = k_at(idx), j = j_at(idx);
    return (k < 0 ? -k : k) <= kmax_ && (j < 0 ? -j : j) <= jmax_;
  }
  std::vector<std::size_t> retained_indices() const;

  friend bool operator==(const SpectralGrid& a, const SpectralGrid& b) {
    return a.nx_ == b.nx_ && a.ny_ == b.ny_ && a.ly_ == b.ly_ && a.dealias_ == b.dealias_;
  }

 private:
  int nx_, ny_;
  double ly_, dealias_;
  int kmax_, jmax_;
};

// Scalar (1 component) or vector (2 components) field of Fourier coefficients.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const SpectralGrid& grid, int components = 1);

  static SpectralField single_mode(const SpectralGrid& grid, int k, int j, cplx amplitude,
                                   int components = 1, int component = 0);

  const SpectralGrid& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  std::size_t modes() const noexcept { return grid_.size(); }

  std::span<cplx> component(int c) { return {coeffs_.data() + c * modes(), modes()}; }
  std::span<const cplx> component(int c) const { return {coeffs_.data() + c * modes(), modes()}; }
  cplx& at(int c, std::size_t idx) { return coeffs_[c * modes() + idx]; }
  cplx at(int c, std::size_t idx) const { return coeffs_[c * modes() + idx]; }
  cplx& operator()(int c, int k, int j) { return at(c, grid_.index(k, j)); }
  cplx operator()(int c, int k, int j) const { return at(c, grid_.index(k, j)); }
  std::vector<cplx>& raw() noexcept { return coeffs_; }
  const std::vector<cplx>& raw() const noexcept { return coeffs_; }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(cplx a);
  // this += a * x
  SpectralField& axpy(cplx a, const SpectralField& x);

  // Sum of |c|^2 over modes, no area factor.
  double norm2() const;
  double norm2(int c) const;
  // Same restricted to k != 0 (the non-x-averaged part).
  double norm2_nonzero_k(int c) const;

  void set_zero();
  void truncate();
  void symmetrize();
  double hermitian_defect() const;
  bool all_finite() const;
  SpectralField extract(int c) const;

 private:
  SpectralGrid grid_;
  int components_ = 0;
  std::vector<cplx> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(cplx s, SpectralField a);

// Symbol arrays in the sheared frame at time t. The derivative symbols are
// i*k and i*q with q = eta - k t.
struct ShearedSymbols {
  double t = 0.0;
  std::vector<double> k;
  std::vector<double> q;
  std::vector<double> lambda;
  std::vector<double> laplacian;

  cplx dx(std::size_t idx) const { return {0.0, k[idx]}; }
  cplx dyt(std::size_t idx) const { return {0.0, q[idx]}; }
};

ShearedSymbols make_sheared_symbols(const SpectralGrid& grid, double t);

// Per-mode complex symbol tied to a grid. Non-finite entries mark modes where
// the symbol is undefined; applying it to a nonzero coefficient there throws.
struct Multiplier {
  SpectralGrid grid;
  std::vector<cplx> values;
};

Multiplier lambda_power_symbol(const SpectralGrid& grid, double t, double a);

SpectralField apply_multiplier(const SpectralField& f, const Multiplier& m);
SpectralField lambda_power(const SpectralField& f, double t, double a);

SpectralField dx(const SpectralField& f);
SpectralField dy_t(const SpectralField& f, double t);
SpectralField grad_t(const SpectralField& scalar, double t);
// (-d_y^t, d_x) applied to a scalar. perp_grad is the t = 0 (lab frame) version.
SpectralField perp_grad_t(const SpectralField& scalar, double t);
SpectralField perp_grad(const SpectralField& scalar);
SpectralField div_t(const SpectralField& vec, double t);
// Scalar curl -d_y^t v^x + d_x v^y.
SpectralField curl_t(const SpectralField& vec, double t);

// Dealiased coefficients of the pointwise product. Vector-vector products are
// componentwise; a scalar factor broadcasts over the other's components.
SpectralField physical_product(const SpectralField& f, const SpectralField& g);

SpectralField leray_project(const SpectralField& v, double t);
double max_abs_div_t(const SpectralField& v, double t);

// Grid values f(x_i, y_j) at x_i = 2 pi i / nx, y_j = ly j / ny (real part).
std::vector<double> to_physical(const SpectralGrid& grid, std::span<const cplx> coeffs);
std::vector<double> to_physical(const SpectralField& f, int component = 0);
// Coefficients of real grid values, dealiased and made exactly Hermitian.
SpectralField from_physical(const SpectralGrid& grid, std::span<const double> values);

// Version string of the FFT backend.
std::string fft_backend_version();

}  // namespace couette
