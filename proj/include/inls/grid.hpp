#pragma once

// Computational grids.  Two modes:
//  - cartesian2d: uniform periodic box [-L, L)^2, power-of-two points per axis,
//    full Fourier support.
//  - radial: nodes r_j = (j + 1/2) dr on (0, L], used for radially symmetric
//    profiles in dimension 2 or 3.  Dimension 3 has full spectral support via
//    a sine-transform substitution; dimension 2 supports quadrature and
//    finite-difference calculus only (see field.hpp).

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace inls {

enum class GridMode { Cartesian2D, Radial };

struct Grid {
  GridMode mode = GridMode::Cartesian2D;
  int dimension = 2;
  int points = 0;    // per-axis count (cartesian) or node count (radial)
  double extent = 0; // half-width L per axis (cartesian) or outer radius (radial)

  static Grid cartesian2d(int n, double L) {
    if (n < 16 || (n & (n - 1)) != 0)
      throw std::invalid_argument("cartesian grid: points must be a power of two >= 16");
    if (!(L > 0)) throw std::invalid_argument("grid extent must be positive");
    return Grid{GridMode::Cartesian2D, 2, n, L};
  }

  static Grid radial(int N, int M, double L) {
    if (N != 2 && N != 3) throw std::invalid_argument("radial grid: dimension 2 or 3");
    if (M < 16) throw std::invalid_argument("radial grid: need at least 16 nodes");
    if (!(L > 0)) throw std::invalid_argument("grid extent must be positive");
    return Grid{GridMode::Radial, N, M, L};
  }

  double spacing() const {
    return mode == GridMode::Cartesian2D ? 2.0 * extent / points : extent / points;
  }

  std::size_t size() const {
    return mode == GridMode::Cartesian2D ? std::size_t(points) * points : std::size_t(points);
  }

  /// Cartesian axis coordinate of index i, or radial node r_j = (j+1/2) dr.
  double coord(int i) const {
    return mode == GridMode::Cartesian2D ? -extent + i * spacing() : (i + 0.5) * spacing();
  }

  /// |x| at a flattened sample index.
  double radius(std::size_t idx) const {
    if (mode == GridMode::Radial) return coord(int(idx));
    int i = int(idx / points), j = int(idx % points);
    double x = coord(i), y = coord(j);
    return std::sqrt(x * x + y * y);
  }

  /// Surface measure of the unit sphere for the radial quadrature.
  double sphere_area() const { return dimension == 2 ? 2.0 * M_PI : 4.0 * M_PI; }

  /// Quadrature weight of one sample (cartesian cell area, or
  /// sigma_{N-1} r^{N-1} dr for radial nodes).
  double quad_weight(std::size_t idx) const {
    if (mode == GridMode::Cartesian2D) {
      double dx = spacing();
      return dx * dx;
    }
    double r = coord(int(idx));
    return sphere_area() * std::pow(r, dimension - 1) * spacing();
  }

  /// Largest resolvable |xi| (Nyquist).
  double nyquist() const { return M_PI / spacing(); }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.mode == b.mode && a.dimension == b.dimension && a.points == b.points &&
           a.extent == b.extent;
  }
};

}  // namespace inls
