#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "couette/spectral.hpp"

namespace testing_support {

using couette::cplx;
using couette::SpectralField;
using couette::SpectralGrid;

// Hermitian random field on the retained modes; the (0,0) mode is cleared
// when `mean_zero`.
inline SpectralField random_field(const SpectralGrid& g, std::uint64_t seed, int components = 1,
                                  bool mean_zero = true) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  SpectralField f(g, components);
  for (auto& c : f.raw()) c = {n(rng), n(rng)};
  f.truncate();
  f.symmetrize();
  if (mean_zero)
    for (int c = 0; c < components; ++c) f.at(c, 0) = 0.0;
  return f;
}

inline double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.raw().size(); ++i) d = std::max(d, std::abs(a.raw()[i] - b.raw()[i]));
  return d;
}

inline double max_abs(const SpectralField& a) {
  double d = 0.0;
  for (const auto& c : a.raw()) d = std::max(d, std::abs(c));
  return d;
}

// max |a - b| / max |b|.
inline double rel_diff(const SpectralField& a, const SpectralField& b) {
  double s = max_abs(b);
  return s > 0.0 ? max_abs_diff(a, b) / s : max_abs(a);
}

inline double rel_err(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

}  // namespace testing_support
