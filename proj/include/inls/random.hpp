#pragma once

// Seeded random smooth fields for stress tests (Gagliardo-Nirenberg ratios,
// Bernstein sweeps).  Spectra are complex Gaussians under a fixed decaying
// envelope; identical seeds give bit-identical fields at any thread count.

#include <random>

#include "inls/field.hpp"

namespace inls {

/// Random smooth complex field: independent complex-Gaussian spectral bins
/// weighted by exp(-|xi|^2 / (2 xi0^2)), normalized to unit L2 norm.
inline SpectralField random_smooth_field(const Grid& g, std::uint64_t seed, double xi0 = 2.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  cvec spec(g.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    double xi = spectral_bin_freq(g, k);
    double env = std::exp(-xi * xi / (2.0 * xi0 * xi0));
    double re = gauss(rng), im = gauss(rng);
    spec[k] = std::complex<double>(re, im) * env;
  }
  SpectralField f = from_spectrum(g, spec);
  double n = l2_norm(f);
  if (n > 0)
    for (auto& v : f.values) v /= n;
  return f;
}

/// Random smooth radial field: a handful of complex-amplitude Gaussian bumps
/// at random centers and widths.  Works on every grid mode (no transform
/// needed), normalized to unit L2 norm.
inline SpectralField random_radial_bumps(const Grid& g, std::uint64_t seed, int bumps = 6) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0), center(0.0, g.extent / 3.0),
      width(0.5, 2.5);
  struct Bump {
    std::complex<double> a;
    double c, s;
  };
  std::vector<Bump> bs(bumps);
  for (auto& bp : bs) bp = {{amp(rng), amp(rng)}, center(rng), width(rng)};
  SpectralField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double r = g.radius(i);
    std::complex<double> v = 0;
    for (const auto& bp : bs) {
      double d = (r - bp.c) / bp.s;
      v += bp.a * std::exp(-d * d);
    }
    f.values[i] = v;
  }
  double n = l2_norm(f);
  if (n > 0)
    for (auto& v : f.values) v /= n;
  return f;
}

}  // namespace inls
