#pragma once

// FFTW-backed transforms, cached per grid signature.  Plans are created with
// FFTW_ESTIMATE | FFTW_UNALIGNED: plan selection is then deterministic across
// processes, which the reproducibility contract needs, and execution works on
// ordinary vectors.

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "inls/grid.hpp"

namespace inls {

using cvec = std::vector<std::complex<double>>;
using dvec = std::vector<double>;

class Transform {
public:
  /// Shared, cached instance for this grid's (mode, dimension, points).
  static std::shared_ptr<const Transform> get(const Grid& g) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int>, std::shared_ptr<const Transform>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(int(g.mode), g.dimension, g.points);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto t = std::shared_ptr<const Transform>(new Transform(g));
    cache.emplace(key, t);
    return t;
  }

  ~Transform() {
    if (fwd_) fftw_destroy_plan(fwd_);
    if (bwd_) fftw_destroy_plan(bwd_);
    if (dst_fwd_) fftw_destroy_plan(dst_fwd_);
    if (dst_bwd_) fftw_destroy_plan(dst_bwd_);
    if (dct3_) fftw_destroy_plan(dct3_);
  }

  // --- cartesian c2c -------------------------------------------------------

  /// Unnormalized forward DFT.
  void forward(const cvec& in, cvec& out) const {
    out.resize(in.size());
    fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
  }

  /// Inverse DFT normalized by 1/n^2 (exact round trip with forward()).
  void backward(const cvec& in, cvec& out) const {
    out.resize(in.size());
    fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
    double scale = 1.0 / double(in.size());
    for (auto& v : out) v *= scale;
  }

  // --- radial sine transforms (dimension 3) --------------------------------
  // Forward: y_k = 2 sum_j x_j sin(pi (j+1/2)(k+1)/M)   (FFTW RODFT10)
  // Backward is the scaled inverse (RODFT01 / 2M).

  void dst_forward(const dvec& in, dvec& out) const {
    out.resize(in.size());
    fftw_execute_r2r(dst_fwd_, const_cast<double*>(in.data()), out.data());
  }

  void dst_backward(const dvec& in, dvec& out) const {
    out.resize(in.size());
    fftw_execute_r2r(dst_bwd_, const_cast<double*>(in.data()), out.data());
    double scale = 1.0 / (2.0 * double(in.size()));
    for (auto& v : out) v *= scale;
  }

  /// y_j = x_0 + 2 sum_{k>=1} x_k cos(pi k (j+1/2)/M)  (FFTW REDFT01); used to
  /// evaluate cosine series arising from differentiated sine series.
  void dct3(const dvec& in, dvec& out) const {
    out.resize(in.size());
    fftw_execute_r2r(dct3_, const_cast<double*>(in.data()), out.data());
  }

private:
  explicit Transform(const Grid& g) {
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (g.mode == GridMode::Cartesian2D) {
      int n = g.points;
      cvec buf(std::size_t(n) * n);
      auto* p = reinterpret_cast<fftw_complex*>(buf.data());
      fwd_ = fftw_plan_dft_2d(n, n, p, p, FFTW_FORWARD, flags);
      bwd_ = fftw_plan_dft_2d(n, n, p, p, FFTW_BACKWARD, flags);
    } else {
      int m = g.points;
      dvec buf(m);
      fftw_r2r_kind k10 = FFTW_RODFT10, k01 = FFTW_RODFT01, kc3 = FFTW_REDFT01;
      dst_fwd_ = fftw_plan_r2r_1d(m, buf.data(), buf.data(), k10, flags);
      dst_bwd_ = fftw_plan_r2r_1d(m, buf.data(), buf.data(), k01, flags);
      dct3_ = fftw_plan_r2r_1d(m, buf.data(), buf.data(), kc3, flags);
    }
  }

  fftw_plan fwd_ = nullptr, bwd_ = nullptr;
  fftw_plan dst_fwd_ = nullptr, dst_bwd_ = nullptr, dct3_ = nullptr;
};

}  // namespace inls
