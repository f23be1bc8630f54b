#pragma once

// Binary snapshot format for fields:
//   magic "INLS", version u32, mode u8, dimension u8, per-axis counts u32,
//   extent f64, b f64, timestamp f64, then interleaved little-endian f64
//   (re, im) pairs in row-major order.
// Cartesian grids carry two axis counts, radial grids one.  Also CSV export
// of radial profiles.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "inls/field.hpp"

namespace inls {

inline constexpr std::uint32_t kSnapshotVersion = 1;

namespace detail {
template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T take(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}
}  // namespace detail

struct SnapshotMeta {
  double b = 0;
  double timestamp = 0;
};

inline void write_snapshot(const std::string& path, const SpectralField& f,
                           const SnapshotMeta& meta) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_snapshot: cannot open " + path);
  os.write("INLS", 4);
  detail::put<std::uint32_t>(os, kSnapshotVersion);
  detail::put<std::uint8_t>(os, f.grid.mode == GridMode::Cartesian2D ? 0 : 1);
  detail::put<std::uint8_t>(os, std::uint8_t(f.grid.dimension));
  int axes = f.grid.mode == GridMode::Cartesian2D ? 2 : 1;
  for (int a = 0; a < axes; ++a) detail::put<std::uint32_t>(os, std::uint32_t(f.grid.points));
  detail::put<double>(os, f.grid.extent);
  detail::put<double>(os, meta.b);
  detail::put<double>(os, meta.timestamp);
  for (const auto& v : f.values) {
    detail::put<double>(os, v.real());
    detail::put<double>(os, v.imag());
  }
  if (!os) throw std::runtime_error("write_snapshot: write failed for " + path);
}

inline SpectralField read_snapshot(const std::string& path, SnapshotMeta* meta = nullptr) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_snapshot: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, "INLS", 4) != 0)
    throw std::runtime_error("read_snapshot: bad magic in " + path);
  auto version = detail::take<std::uint32_t>(is);
  if (version != kSnapshotVersion)
    throw std::runtime_error("read_snapshot: unsupported version");
  auto mode = detail::take<std::uint8_t>(is);
  auto dim = detail::take<std::uint8_t>(is);
  int axes = mode == 0 ? 2 : 1;
  std::uint32_t counts[2] = {0, 0};
  for (int a = 0; a < axes; ++a) counts[a] = detail::take<std::uint32_t>(is);
  double extent = detail::take<double>(is);
  SnapshotMeta m;
  m.b = detail::take<double>(is);
  m.timestamp = detail::take<double>(is);
  if (meta) *meta = m;
  Grid g = mode == 0 ? Grid::cartesian2d(int(counts[0]), extent)
                     : Grid::radial(dim, int(counts[0]), extent);
  SpectralField f(g);
  for (auto& v : f.values) {
    double re = detail::take<double>(is);
    double im = detail::take<double>(is);
    v = {re, im};
  }
  if (!is) throw std::runtime_error("read_snapshot: truncated file " + path);
  return f;
}

/// CSV of the radial profile: "r,re,im,abs".  Radial grids dump every node;
/// cartesian grids dump the positive-x axis through the center.
inline std::string radial_profile_csv(const SpectralField& f) {
  std::ostringstream os;
  os << "r,re,im,abs\n" << std::setprecision(17);
  if (f.grid.mode == GridMode::Radial) {
    for (int j = 0; j < f.grid.points; ++j) {
      auto v = f.values[j];
      os << f.grid.coord(j) << ',' << v.real() << ',' << v.imag() << ',' << std::abs(v) << '\n';
    }
  } else {
    int n = f.grid.points, c = n / 2;
    for (int i = c; i < n; ++i) {
      auto v = f.values[std::size_t(i) * n + c];
      os << f.grid.coord(i) << ',' << v.real() << ',' << v.imag() << ',' << std::abs(v) << '\n';
    }
  }
  return os.str();
}

}  // namespace inls
