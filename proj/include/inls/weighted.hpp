#pragma once

// Quadrature of weighted integrals int |x|^{-b} |f|^p dx.
//
// On cartesian grids this is the plain cell sum against the regularized
// weight.  On radial grids the |x|^{-b} factor is handled by product
// integration: |f|^p is interpolated by a parabola on each cell and the
// power-law moments int r^{N-1-b} (r - r_j)^k dr are integrated exactly, so
// the fractional power at the origin costs no accuracy.

#include <cmath>

#include "inls/field.hpp"

namespace inls {

namespace detail {

/// int_a^c r^{nu} dr, valid for nu > -1.
inline double power_moment(double nu, double a, double c) {
  return (std::pow(c, nu + 1.0) - std::pow(a, nu + 1.0)) / (nu + 1.0);
}

}  // namespace detail

/// int |x|^{-b} |f(x)|^p dx.  reg_radius < 0 selects the grid default
/// (cartesian only; radial product integration needs no regularization).
inline double weighted_power_integral(const SpectralField& f, double b, double p,
                                      double reg_radius = -1.0) {
  const Grid& g = f.grid;
  if (g.mode == GridMode::Cartesian2D) {
    double rho = reg_radius > 0 ? reg_radius : default_reg_radius(g);
    double acc = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double r = std::max(g.radius(i), rho);
      acc += std::pow(r, -b) * std::pow(std::abs(f.values[i]), p) * g.quad_weight(i);
    }
    return acc;
  }
  const int m = g.points;
  const double h = g.spacing();
  const double nu = g.dimension - 1 - b;  // > -1 whenever b < N
  dvec s(m);
  for (int j = 0; j < m; ++j) s[j] = std::pow(std::abs(f.values[j]), p);
  double acc = 0;
  for (int j = 0; j < m; ++j) {
    // Parabola through three consecutive samples, written in t = r - r_j.
    double c0 = s[j], c1, c2;
    if (j == 0) {
      c1 = (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * h);
      c2 = (s[0] - 2.0 * s[1] + s[2]) / (2.0 * h * h);
    } else if (j == m - 1) {
      c1 = (3.0 * s[j] - 4.0 * s[j - 1] + s[j - 2]) / (2.0 * h);
      c2 = (s[j] - 2.0 * s[j - 1] + s[j - 2]) / (2.0 * h * h);
    } else {
      c1 = (s[j + 1] - s[j - 1]) / (2.0 * h);
      c2 = (s[j + 1] - 2.0 * s[j] + s[j - 1]) / (2.0 * h * h);
    }
    double rj = g.coord(j), a = j * h, c = (j + 1) * h;
    double m0 = detail::power_moment(nu, a, c);
    double m1 = detail::power_moment(nu + 1.0, a, c) - rj * m0;
    double m2 = detail::power_moment(nu + 2.0, a, c) - 2.0 * rj * detail::power_moment(nu + 1.0, a, c) +
                rj * rj * m0;
    acc += c0 * m0 + c1 * m1 + c2 * m2;
  }
  return g.sphere_area() * acc;
}

}  // namespace inls
