#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "inls/groundstate.hpp"
#include "inls/random.hpp"

using namespace inls;
using std::numbers::pi;

namespace {

void check_profile_invariants(const GroundState& gs) {
  REQUIRE(gs.Q.grid.mode == GridMode::Radial);
  const auto& v = gs.Q.values;
  CHECK(v[0].real() > 0.0);
  for (std::size_t j = 0; j + 1 < v.size(); ++j)
    CHECK(v[j + 1].real() <= v[j].real() + 1e-12);
  // Stabilizing factor settles to 1 monotonically in the tail, until the
  // deviation reaches the roundoff floor where it just jitters.
  for (std::size_t n = 10; n + 1 < gs.m_history.size(); ++n) {
    if (std::abs(gs.m_history[n] - 1.0) < 1e-11) break;
    CHECK(std::abs(gs.m_history[n + 1] - 1.0) <= std::abs(gs.m_history[n] - 1.0));
  }
  CHECK(gs.energy > 0.0);
  CHECK(gs.threshold_ME > 0.0);
  CHECK(gs.threshold_grad > 0.0);
}

/// Independent shooting-method mass of the classical (b=0) cubic ground state
/// in dimension 2: integrate Q'' + Q'/r - Q + Q^3 = 0 outward, bisecting on
/// Q(0) between decay and blowup, then quadrate 2 pi int Q^2 r dr.
double townes_mass_shooting() {
  auto shoot = [](double a, std::vector<double>* profile, double h) {
    // Series start: Q(r) ~ a + (a - a^3) r^2 / 4 near r = 0 (dimension 2).
    double r = h / 2.0;
    double q = a + (a - a * a * a) * r * r / 4.0;
    double p = (a - a * a * a) * r / 2.0;
    int verdict = 0;  // +1 overshoot (crosses zero), -1 undershoot (turns up)
    while (r < 25.0) {
      auto f = [](double rr, double qq, double pp) {
        return std::pair<double, double>{pp, qq - qq * qq * qq - pp / rr};
      };
      auto [k1q, k1p] = f(r, q, p);
      auto [k2q, k2p] = f(r + h / 2, q + h / 2 * k1q, p + h / 2 * k1p);
      auto [k3q, k3p] = f(r + h / 2, q + h / 2 * k2q, p + h / 2 * k2p);
      auto [k4q, k4p] = f(r + h, q + h * k3q, p + h * k3p);
      q += h / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
      p += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
      r += h;
      if (profile) profile->push_back(q);
      if (q < 0) {
        verdict = 1;
        break;
      }
      if (q < a && p > 0) {
        verdict = -1;
        break;
      }
    }
    return verdict;
  };
  double lo = 2.0, hi = 2.5;
  const double h = 1e-3;
  for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    (shoot(mid, nullptr, h) == 1 ? hi : lo) = mid;
  }
  std::vector<double> prof;
  prof.push_back(0.5 * (lo + hi));  // value at first node r = h/2 approx Q(0)
  shoot(0.5 * (lo + hi), &prof, h);
  double acc = 0;
  for (std::size_t j = 0; j < prof.size(); ++j) {
    double r = h / 2.0 + j * h;
    double q = std::max(prof[j], 0.0);
    acc += q * q * r * h;
  }
  return 2.0 * pi * acc;
}

}  // namespace

TEST_CASE("ground state, dimension 3 radial, b=1/2, alpha=2") {
  auto g = Grid::radial(3, 8192, 20.0);
  auto gs = solve_ground_state_raw(0.5, 2.0, g, 1e-10);
  CHECK(gs.residual < 1e-10);
  check_profile_invariants(gs);
  auto po = pohozaev_check(gs, 0.5, 2.0);
  INFO("pairing " << po.pairing_residual << " dilation " << po.dilation_residual << " ratio "
                  << po.ratio_residual);
  CHECK(po.ok(1e-6));
  // GN ratio is exactly 1 at Q by construction of the constant.
  CHECK(gn_ratio(gs.Q, 0.5, 2.0, gs.gn_constant) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ground state, dimension 2 radial, b=1/2, alpha=3") {
  auto g = Grid::radial(2, 32768, 20.0);
  auto gs = solve_ground_state_raw(0.5, 3.0, g, 1e-10);
  CHECK(gs.residual < 1e-10);
  check_profile_invariants(gs);
  auto po = pohozaev_check(gs, 0.5, 3.0);
  INFO("pairing " << po.pairing_residual << " dilation " << po.dilation_residual << " ratio "
                  << po.ratio_residual);
  CHECK(po.ok(1e-6));
  CHECK(gn_ratio(gs.Q, 0.5, 3.0, gs.gn_constant) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("GN inequality on random radial fields") {
  auto g = Grid::radial(3, 2048, 20.0);
  auto gs = solve_ground_state_raw(0.5, 2.0, g, 1e-10);
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto f = random_radial_bumps(g, seed);
    worst = std::max(worst, gn_ratio(f, 0.5, 2.0, gs.gn_constant));
  }
  INFO("worst GN ratio " << worst);
  CHECK(worst <= 1.0 + 1e-3);
}

TEST_CASE("GN ratio is invariant under the critical rescaling") {
  // u_lambda(x) = lambda^{(2-b)/alpha} u(lambda x) leaves both sides of the
  // GN inequality invariant; check the exponent bookkeeping numerically.
  double b = 0.5, alpha = 2.0;
  auto g = Grid::radial(3, 8192, 20.0);
  auto sample = [&](double lambda) {
    return sample_radial(g, [&](double r) {
      double rr = lambda * r;
      return std::complex<double>(std::pow(lambda, (2.0 - b) / alpha) * std::exp(-rr * rr / 2.0),
                                  0.0);
    });
  };
  double base = gn_ratio(sample(1.0), b, alpha, 1.0);
  for (double lambda : {0.5, 2.0}) {
    double scaled = gn_ratio(sample(lambda), b, alpha, 1.0);
    CHECK(scaled == Catch::Approx(base).epsilon(1e-8));
  }
}

TEST_CASE("b=0 cubic limit matches the shooting-method Townes mass") {
  auto g = Grid::radial(2, 2048, 20.0);
  auto gs = solve_ground_state_raw(0.0, 2.0, g, 1e-10);
  CHECK(gs.residual < 1e-10);
  double oracle = townes_mass_shooting();
  INFO("petviashvili mass " << gs.mass << " shooting mass " << oracle);
  CHECK(gs.mass == Catch::Approx(oracle).epsilon(1e-4));
}

TEST_CASE("cartesian ground state converges too") {
  auto g = Grid::cartesian2d(256, 16.0);
  auto gs = solve_ground_state_raw(0.5, 3.0, g, 1e-10);
  CHECK(gs.residual < 1e-10);
  CHECK(gs.energy > 0.0);
  // Profile decays away from the center along the axis.
  int n = g.points, c = n / 2;
  double center = gs.Q.values[std::size_t(c) * n + c].real();
  double mid = gs.Q.values[std::size_t(c) * n + c + n / 4].real();
  CHECK(center > 0.1);
  CHECK(mid < 0.01 * center);
}

TEST_CASE("grid refinement leaves the integrals stable") {
  auto coarse = solve_ground_state_raw(0.5, 2.0, Grid::radial(3, 8192, 20.0), 1e-10);
  auto fine = solve_ground_state_raw(0.5, 2.0, Grid::radial(3, 16384, 20.0), 1e-10);
  CHECK(fine.mass == Catch::Approx(coarse.mass).epsilon(1e-6));
  CHECK(fine.kinetic == Catch::Approx(coarse.kinetic).epsilon(1e-6));
  CHECK(fine.potential == Catch::Approx(coarse.potential).epsilon(1e-6));
}

TEST_CASE("solver error paths") {
  auto g = Grid::radial(3, 256, 20.0);
  CHECK_THROWS_AS(solve_ground_state_raw(0.5, 2.0, g, 1e-10, 3), std::runtime_error);
  auto p = validate_params(3, Rational(1, 2), Rational(2)).params;
  CHECK_THROWS_AS(solve_ground_state(p, Grid::cartesian2d(16, 4.0), 1e-10),
                  std::invalid_argument);
}
