#pragma once

// SpectralField: complex samples on a grid, plus the Fourier-side calculus
// used everywhere else: Sobolev norms, the free propagator, Littlewood-Paley
// projections, spectral derivatives and the regularized singular weight.
//
// Cartesian grids get the full multiplier calculus from the 2d FFT.  Radial
// dimension-3 grids get the same through the substitution g = r f, under
// which the radial Laplacian becomes d^2/dr^2 and a sine transform
// diagonalizes everything.  Radial dimension-2 grids support quadrature and
// fourth-order finite-difference calculus only (enough for the ground-state
// solver); multiplier operations throw there.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "inls/grid.hpp"
#include "inls/smoothstep.hpp"
#include "inls/transform.hpp"

namespace inls {

struct SpectralField {
  Grid grid;
  cvec values;

  SpectralField() = default;
  explicit SpectralField(const Grid& g) : grid(g), values(g.size()) {}
  SpectralField(const Grid& g, cvec v) : grid(g), values(std::move(v)) {
    if (values.size() != g.size()) throw std::invalid_argument("field size mismatch");
  }
};

/// Sample a function of (x, y) on a cartesian grid.
inline SpectralField sample_cartesian(const Grid& g,
                                      const std::function<std::complex<double>(double, double)>& f) {
  if (g.mode != GridMode::Cartesian2D) throw std::invalid_argument("cartesian grid expected");
  SpectralField out(g);
  int n = g.points;
  for (int i = 0; i < n; ++i) {
    double x = g.coord(i);
    for (int j = 0; j < n; ++j) out.values[std::size_t(i) * n + j] = f(x, g.coord(j));
  }
  return out;
}

/// Sample a radial profile on a radial grid.
inline SpectralField sample_radial(const Grid& g,
                                   const std::function<std::complex<double>(double)>& f) {
  if (g.mode != GridMode::Radial) throw std::invalid_argument("radial grid expected");
  SpectralField out(g);
  for (int j = 0; j < g.points; ++j) out.values[j] = f(g.coord(j));
  return out;
}

// ---------------------------------------------------------------------------
// quadrature

/// Integral of a sampled scalar (trapezoid-free: midpoint in radial mode,
/// exact cell sum in cartesian mode).
inline double integrate(const Grid& g, const std::function<double(std::size_t)>& f) {
  double acc = 0;
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) acc += f(i) * g.quad_weight(i);
  return acc;
}

inline double l2_norm_sq(const SpectralField& f) {
  return integrate(f.grid, [&](std::size_t i) { return std::norm(f.values[i]); });
}

inline double l2_norm(const SpectralField& f) { return std::sqrt(l2_norm_sq(f)); }

/// Re <f, g> under the grid quadrature.
inline double inner_real(const SpectralField& f, const SpectralField& g) {
  if (!(f.grid == g.grid)) throw std::invalid_argument("grid mismatch");
  double acc = 0;
  for (std::size_t i = 0; i < f.grid.size(); ++i)
    acc += (std::conj(f.values[i]) * g.values[i]).real() * f.grid.quad_weight(i);
  return acc;
}

// ---------------------------------------------------------------------------
// spectra and multipliers

namespace detail {

/// Signed cartesian frequency of index k on an n-point axis of half-width L.
inline double axis_freq(int k, int n, double L) {
  int kk = k < n / 2 ? k : k - n;
  return M_PI * kk / L;
}

/// Radial sine frequency xi_k = (k+1) pi / L.
inline double radial_freq(int k, double L) { return M_PI * (k + 1) / L; }

inline void require_multiplier_support(const Grid& g, const char* op) {
  if (g.mode == GridMode::Radial && g.dimension != 3)
    throw std::invalid_argument(std::string(op) +
                                ": Fourier multipliers unsupported on radial dimension-2 grids"
                                " (use a cartesian grid for full 2d spectral calculus)");
}

}  // namespace detail

/// Forward spectrum.  Cartesian: plain 2d DFT of the samples.  Radial (3d):
/// sine coefficients of g = r f (FFTW RODFT10 of real and imaginary parts).
inline cvec to_spectrum(const SpectralField& f) {
  detail::require_multiplier_support(f.grid, "to_spectrum");
  auto t = Transform::get(f.grid);
  if (f.grid.mode == GridMode::Cartesian2D) {
    cvec out;
    t->forward(f.values, out);
    return out;
  }
  const int m = f.grid.points;
  dvec re(m), im(m), ore, oim;
  for (int j = 0; j < m; ++j) {
    double r = f.grid.coord(j);
    re[j] = f.values[j].real() * r;
    im[j] = f.values[j].imag() * r;
  }
  t->dst_forward(re, ore);
  t->dst_forward(im, oim);
  cvec out(m);
  for (int k = 0; k < m; ++k) out[k] = {ore[k], oim[k]};
  return out;
}

inline SpectralField from_spectrum(const Grid& g, const cvec& spec) {
  detail::require_multiplier_support(g, "from_spectrum");
  auto t = Transform::get(g);
  if (g.mode == GridMode::Cartesian2D) {
    cvec out;
    t->backward(spec, out);
    return SpectralField(g, std::move(out));
  }
  const int m = g.points;
  dvec re(m), im(m), ore, oim;
  for (int k = 0; k < m; ++k) {
    re[k] = spec[k].real();
    im[k] = spec[k].imag();
  }
  t->dst_backward(re, ore);
  t->dst_backward(im, oim);
  SpectralField out(g);
  for (int j = 0; j < m; ++j) {
    double r = g.coord(j);
    out.values[j] = std::complex<double>(ore[j], oim[j]) / r;
  }
  return out;
}

/// Applies a complex multiplier m(|xi|) on the discrete spectrum.
inline SpectralField apply_multiplier(const SpectralField& f,
                                      const std::function<std::complex<double>(double)>& mult) {
  detail::require_multiplier_support(f.grid, "apply_multiplier");
  cvec spec = to_spectrum(f);
  if (f.grid.mode == GridMode::Cartesian2D) {
    const int n = f.grid.points;
    const double L = f.grid.extent;
    for (int i = 0; i < n; ++i) {
      double xi = detail::axis_freq(i, n, L);
      for (int j = 0; j < n; ++j) {
        double eta = detail::axis_freq(j, n, L);
        spec[std::size_t(i) * n + j] *= mult(std::sqrt(xi * xi + eta * eta));
      }
    }
  } else {
    for (int k = 0; k < f.grid.points; ++k)
      spec[k] *= mult(detail::radial_freq(k, f.grid.extent));
  }
  return from_spectrum(f.grid, spec);
}

/// Parseval weight of spectral bin i (cartesian) or k (radial).
inline double spectral_weight(const Grid& g, std::size_t k) {
  if (g.mode == GridMode::Cartesian2D) {
    double dx = g.spacing();
    return dx * dx / double(g.size());
  }
  // radial: L2 norm of f equals sigma * dr * sum_j |g_j|^2 with g = r f, and
  // the DST-II rows have squared norm 2M except the last one (4M).
  double base = g.sphere_area() * g.spacing() / (2.0 * g.points);
  return k + 1 == std::size_t(g.points) ? base / 2.0 : base;
}

inline double spectral_bin_freq(const Grid& g, std::size_t idx) {
  if (g.mode == GridMode::Radial) return detail::radial_freq(int(idx), g.extent);
  const int n = g.points;
  double xi = detail::axis_freq(int(idx) / n, n, g.extent);
  double eta = detail::axis_freq(int(idx) % n, n, g.extent);
  return std::sqrt(xi * xi + eta * eta);
}

// ---------------------------------------------------------------------------
// norms

/// || |nabla|^s f ||_L2 (homogeneous) or ||(1-Laplacian)^{s/2} f||_L2,
/// via the multipliers |xi|^s and (1+|xi|^2)^{s/2}.  Only s in [0,1] is used
/// by this artifact and anything else is rejected.
inline double sobolev_norm(const SpectralField& f, double s, bool homogeneous = true) {
  if (s < 0.0 || s > 1.0) throw std::invalid_argument("sobolev_norm: s must lie in [0,1]");
  detail::require_multiplier_support(f.grid, "sobolev_norm");
  cvec spec = to_spectrum(f);
  double acc = 0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    double xi2 = spectral_bin_freq(f.grid, k);
    xi2 *= xi2;
    double m2 = homogeneous ? std::pow(xi2, s) : std::pow(1.0 + xi2, s);
    acc += m2 * std::norm(spec[k]) * spectral_weight(f.grid, k);
  }
  return std::sqrt(acc);
}

inline double h1_norm(const SpectralField& f) { return sobolev_norm(f, 1.0, false); }

// ---------------------------------------------------------------------------
// free propagator and Littlewood-Paley

/// e^{it Laplacian}: multiplies the spectrum by e^{-i t |xi|^2}.  Exactly
/// unitary on the grid.
inline SpectralField free_propagate(const SpectralField& f, double t) {
  return apply_multiplier(f, [t](double xi) {
    return std::exp(std::complex<double>(0.0, -t * xi * xi));
  });
}

/// Smooth frequency projector: symbol 1 on |xi| <= cutoff, 0 on
/// |xi| >= 2 cutoff, the shared smoothstep in between.  When the cutoff
/// reaches Nyquist the projection is the identity; *clipped reports that.
inline SpectralField littlewood_paley(const SpectralField& f, double cutoff,
                                      bool* clipped = nullptr) {
  if (!(cutoff > 0)) throw std::invalid_argument("littlewood_paley: cutoff must be positive");
  if (clipped) *clipped = cutoff >= f.grid.nyquist();
  return apply_multiplier(f, [cutoff](double xi) {
    return std::complex<double>(1.0 - smoothstep(xi / cutoff - 1.0), 0.0);
  });
}

// ---------------------------------------------------------------------------
// derivatives

namespace detail {

/// Fourth-order centered first derivative on radial nodes, even-extending
/// through the origin (r_{-1-j} = -r_j carries f_{-1-j} = f_j) and zero
/// beyond the outer edge.
inline cvec radial_fd_derivative(const Grid& g, const cvec& v) {
  const int m = g.points;
  const double inv = 1.0 / (12.0 * g.spacing());
  auto at = [&](int j) -> std::complex<double> {
    if (j >= 0 && j < m) return v[j];
    if (j < 0) return v[-1 - j];  // even reflection across r = 0
    return {0.0, 0.0};
  };
  cvec out(m);
  for (int j = 0; j < m; ++j)
    out[j] = (at(j - 2) - 8.0 * at(j - 1) + 8.0 * at(j + 1) - at(j + 2)) * inv;
  return out;
}

inline cvec radial_fd_second(const Grid& g, const cvec& v) {
  const int m = g.points;
  const double dx = g.spacing();
  const double inv = 1.0 / (12.0 * dx * dx);
  auto at = [&](int j) -> std::complex<double> {
    if (j >= 0 && j < m) return v[j];
    if (j < 0) return v[-1 - j];
    return {0.0, 0.0};
  };
  cvec out(m);
  for (int j = 0; j < m; ++j)
    out[j] = (-at(j - 2) + 16.0 * at(j - 1) - 30.0 * at(j) + 16.0 * at(j + 1) - at(j + 2)) * inv;
  return out;
}

}  // namespace detail

/// Gradient components.  Cartesian: (d/dx, d/dy) by spectral differentiation.
/// Radial: the single radial derivative (spectral via the sine/cosine route in
/// dimension 3, fourth-order finite differences in dimension 2).
inline std::vector<SpectralField> gradient(const SpectralField& f) {
  if (f.grid.mode == GridMode::Cartesian2D) {
    const int n = f.grid.points;
    const double L = f.grid.extent;
    cvec spec = to_spectrum(f);
    cvec sx(spec.size()), sy(spec.size());
    for (int i = 0; i < n; ++i) {
      double xi = detail::axis_freq(i, n, L);
      for (int j = 0; j < n; ++j) {
        double eta = detail::axis_freq(j, n, L);
        std::size_t idx = std::size_t(i) * n + j;
        sx[idx] = spec[idx] * std::complex<double>(0.0, xi);
        sy[idx] = spec[idx] * std::complex<double>(0.0, eta);
      }
    }
    std::vector<SpectralField> out;
    out.push_back(from_spectrum(f.grid, sx));
    out.push_back(from_spectrum(f.grid, sy));
    return out;
  }
  if (f.grid.dimension == 3) {
    // g = r f; f' = (g' - f)/r with g' evaluated from the differentiated sine
    // series (a shifted cosine series; the top cosine mode vanishes at the
    // offset nodes, so nothing is lost).
    const int m = f.grid.points;
    const double L = f.grid.extent;
    auto t = Transform::get(f.grid);
    cvec spec = to_spectrum(f);
    dvec cre(m, 0.0), cim(m, 0.0), ore, oim;
    for (int k = 0; k + 1 < m; ++k) {
      double xi = detail::radial_freq(k, L);
      double c = xi / (2.0 * m);  // c_k = spec_k / M, halved for the DCT-III layout
      cre[k + 1] = spec[k].real() * c;
      cim[k + 1] = spec[k].imag() * c;
    }
    t->dct3(cre, ore);
    t->dct3(cim, oim);
    SpectralField out(f.grid);
    for (int j = 0; j < m; ++j) {
      double r = f.grid.coord(j);
      std::complex<double> gp(ore[j], oim[j]);
      out.values[j] = (gp - f.values[j]) / r;
    }
    return {out};
  }
  return {SpectralField(f.grid, detail::radial_fd_derivative(f.grid, f.values))};
}

/// Laplacian.  Cartesian and radial-3d spectrally; radial-2d by fourth-order
/// finite differences of f'' + f'/r.
inline SpectralField laplacian(const SpectralField& f) {
  if (f.grid.mode == GridMode::Cartesian2D || f.grid.dimension == 3)
    return apply_multiplier(f, [](double xi) { return std::complex<double>(-xi * xi, 0.0); });
  cvec d1 = detail::radial_fd_derivative(f.grid, f.values);
  cvec d2 = detail::radial_fd_second(f.grid, f.values);
  SpectralField out(f.grid);
  for (int j = 0; j < f.grid.points; ++j)
    out.values[j] = d2[j] + d1[j] / f.grid.coord(j);
  return out;
}

/// ||grad f||_L2^2 by quadrature of the gradient components (works in every
/// grid mode, including radial 2d).
inline double kinetic_quad(const SpectralField& f) {
  auto g = gradient(f);
  double acc = 0;
  for (const auto& comp : g) acc += l2_norm_sq(comp);
  return acc;
}

// ---------------------------------------------------------------------------
// singular weight

/// Samples of min(|x|, rho)^{-b}: the |x|^{-b} power law, truncated at the
/// regularization radius rho.  Radial nodes never sit at the origin, so with
/// rho < dr/2 the weight is the untruncated power law there.
struct SingularWeight {
  Grid grid;
  double b = 0;
  double reg_radius = 0;
  dvec samples;
};

inline SingularWeight make_weight(const Grid& g, double b, double reg_radius) {
  if (!(reg_radius > 0)) throw std::invalid_argument("make_weight: reg_radius must be positive");
  SingularWeight w{g, b, reg_radius, dvec(g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) {
    double r = std::max(g.radius(i), reg_radius);
    w.samples[i] = std::pow(r, -b);
  }
  return w;
}

/// Default regularization radius: half a grid cell.
inline double default_reg_radius(const Grid& g) { return g.spacing() / 2.0; }

// ---------------------------------------------------------------------------
// wrap-around guard

/// Fraction of the L2 mass living in the outer 10% shell (sup-norm shell in
/// the cartesian box, radial shell otherwise).
inline double shell_mass_fraction(const SpectralField& f) {
  const double thresh = 0.9 * f.grid.extent;
  double shell = 0, total = 0;
  const int n = f.grid.points;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    double w = f.grid.quad_weight(i) * std::norm(f.values[i]);
    total += w;
    double d;
    if (f.grid.mode == GridMode::Cartesian2D)
      d = std::max(std::abs(f.grid.coord(int(i) / n)), std::abs(f.grid.coord(int(i) % n)));
    else
      d = f.grid.coord(int(i));
    if (d > thresh) shell += w;
  }
  return total > 0 ? std::sqrt(shell / total) : 0.0;
}

}  // namespace inls
