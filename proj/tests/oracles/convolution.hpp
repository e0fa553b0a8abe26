#pragma once

// Direct lattice sums used to check the FFT product paths.

#include <complex>
#include <cstdlib>

#include "couette/spectral.hpp"

namespace oracle {

using couette::cplx;
using couette::SpectralField;

// Linear convolution over retained modes, output restricted to retained modes.
inline SpectralField convolve(const SpectralField& f, int cf, const SpectralField& g, int cg) {
  const auto& grid = f.grid();
  const int K = grid.kmax(), J = grid.jmax();
  SpectralField out(grid, 1);
  for (int k = -K; k <= K; ++k)
    for (int j = -J; j <= J; ++j) {
      cplx s = 0.0;
      for (int k1 = -K; k1 <= K; ++k1)
        for (int j1 = -J; j1 <= J; ++j1) {
          int k2 = k - k1, j2 = j - j1;
          if (std::abs(k2) > K || std::abs(j2) > J) continue;
          s += f(cf, k1, j1) * g(cg, k2, j2);
        }
      out(0, k, j) = s;
    }
  return out;
}

// -(v . grad_t) w written as the lattice sum with kernel
// (k xi - l eta) / |l, xi - l t|^2 over (l, xi) and (k - l, eta - xi).
inline SpectralField ns_transport(const SpectralField& w, double t) {
  const auto& grid = w.grid();
  const int K = grid.kmax(), J = grid.jmax();
  const double h = grid.eta_unit();
  SpectralField out(grid, 1);
  for (int k = -K; k <= K; ++k)
    for (int j = -J; j <= J; ++j) {
      cplx s = 0.0;
      for (int l = -K; l <= K; ++l)
        for (int i = -J; i <= J; ++i) {
          int dk = k - l, dj = j - i;
          if (std::abs(dk) > K || std::abs(dj) > J) continue;
          double q = i * h - l * t;
          double lam2 = double(l) * l + q * q;
          if (lam2 == 0.0) continue;
          double kern = (k * (i * h) - l * (j * h)) / lam2;
          s += kern * w(0, l, i) * w(0, dk, dj);
        }
      out(0, k, j) = s;
    }
  return out;
}

}  // namespace oracle
