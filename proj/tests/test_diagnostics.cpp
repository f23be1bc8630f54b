#include <catch2/catch_amalgamated.hpp>

#include "inls/diagnostics.hpp"

using namespace inls;

namespace {

SpectralField gaussian2d(const Grid& g, double amp = 1.0, double x0 = 0.0) {
  return sample_cartesian(g, [&](double x, double y) {
    return std::complex<double>(amp * std::exp(-((x - x0) * (x - x0) + y * y) / 2.0), 0.0);
  });
}

const GroundState& radial_gs() {
  static GroundState gs = solve_ground_state_raw(0.5, 2.0, Grid::radial(3, 2048, 20.0), 1e-10);
  return gs;
}

}  // namespace

TEST_CASE("threshold classification at, below and above the ground state") {
  double b = 0.5, alpha = 2.0;
  const auto& gs = radial_gs();

  SECTION("Q itself is at-threshold with unit ratios") {
    auto r = classify_threshold(gs.Q, gs, b, alpha);
    CHECK(r.ME_ratio == Catch::Approx(1.0).margin(1e-9));
    CHECK(r.grad_ratio == Catch::Approx(1.0).margin(1e-9));
    CHECK(r.classification == ThresholdClass::AtThreshold);
  }

  SECTION("0.5 Q is sub-threshold with the closed-form scalings") {
    double c = 0.5;
    SpectralField u = gs.Q;
    for (auto& v : u.values) v *= c;
    auto r = classify_threshold(u, gs, b, alpha);
    CHECK(r.grad_ratio == Catch::Approx(c).epsilon(1e-9));
    double closed = c * c * gs.kinetic / 2.0 -
                    std::pow(c, alpha + 2.0) * gs.potential / (alpha + 2.0);
    CHECK(r.energy == Catch::Approx(closed).epsilon(1e-10));
    CHECK(r.ME_ratio < 1.0);
    CHECK(r.classification == ThresholdClass::SubThreshold);
    // The wave-operator smallness flag scales by c^2 relative to Q.
    auto rq = classify_threshold(gs.Q, gs, b, alpha);
    CHECK(r.finalstate_ratio == Catch::Approx(c * c * rq.finalstate_ratio).epsilon(1e-9));
    CHECK(r.finalstate_ok);
  }

  SECTION("2 Q is above threshold in the gradient functional") {
    SpectralField u = gs.Q;
    for (auto& v : u.values) v *= 2.0;
    auto r = classify_threshold(u, gs, b, alpha);
    CHECK(r.grad_ratio == Catch::Approx(2.0).epsilon(1e-9));
    CHECK(r.classification != ThresholdClass::SubThreshold);
  }

  SECTION("amplitude search reaches the negative-energy class") {
    bool found = false;
    for (double A = 1.0; A < 50.0; A *= 1.3) {
      auto g = Grid::radial(3, 1024, 16.0);
      auto u = sample_radial(g, [&](double r) {
        return std::complex<double>(A * std::exp(-r * r / 2.0), 0.0);
      });
      auto r = classify_threshold(u, gs, b, alpha);
      if (r.classification == ThresholdClass::NegativeEnergy) {
        CHECK(r.energy < 0.0);
        CHECK(std::isnan(r.ME_ratio));
        found = true;
        break;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("threshold classification invariances") {
  auto g = Grid::cartesian2d(128, 12.0);
  double b = 0.5, alpha = 3.0;
  auto gs = solve_ground_state_raw(b, alpha, g, 1e-10);
  auto u = gaussian2d(g, 0.7);
  auto base = classify_threshold(u, gs, b, alpha);

  SECTION("phase rotation leaves both ratios unchanged") {
    SpectralField v = u;
    auto ph = std::polar(1.0, 1.1);
    for (auto& z : v.values) z *= ph;
    auto r = classify_threshold(v, gs, b, alpha);
    CHECK(r.ME_ratio == Catch::Approx(base.ME_ratio).epsilon(1e-12));
    CHECK(r.grad_ratio == Catch::Approx(base.grad_ratio).epsilon(1e-12));
    CHECK(r.classification == base.classification);
  }

  SECTION("translation leaves the gradient functional unchanged") {
    // The |x|^{-b} weight is inhomogeneous, so the energy functional genuinely
    // depends on position; only the mass/gradient functional is translation
    // invariant.
    auto v = gaussian2d(g, 0.7, 2.0);
    auto r = classify_threshold(v, gs, b, alpha);
    CHECK(r.grad_ratio == Catch::Approx(base.grad_ratio).epsilon(1e-8));
    CHECK(r.potential != Catch::Approx(base.potential).epsilon(1e-3));
  }
}

TEST_CASE("coercivity checklist") {
  double b = 0.5, alpha = 2.0;
  const auto& gs = radial_gs();

  SECTION("0.5 Q satisfies the hypotheses with positive margins") {
    SpectralField u = gs.Q;
    for (auto& v : u.values) v *= 0.5;
    auto r = coercivity_check(u, gs, b, alpha);
    CHECK(r.applicable);
    CHECK(r.energy_ratio > 0.0);
    CHECK(r.gap == Catch::Approx(0.5).epsilon(1e-9));
    CHECK(r.item3_value > 0.0);
    CHECK(r.item3_ratio > 0.0);
  }

  SECTION("small data: the virial quantity approaches 8 ||grad u||^2") {
    SpectralField u = gs.Q;
    for (auto& v : u.values) v *= 1e-3;
    auto r = coercivity_check(u, gs, b, alpha);
    CHECK(r.applicable);
    CHECK(r.item3_ratio == Catch::Approx(8.0).epsilon(1e-3));
  }

  SECTION("Q fails the strict hypotheses: report inapplicable") {
    auto r = coercivity_check(gs.Q, gs, b, alpha);
    CHECK_FALSE(r.applicable);
    CHECK(r.threshold.classification == ThresholdClass::AtThreshold);
  }
}

TEST_CASE("virial contradiction monitor") {
  SECTION("FTC consistency on a generic nonlinear run") {
    auto g = Grid::cartesian2d(128, 12.0);
    auto cfg = make_evolution_config(g, 0.5, 2.0, 0.5, 5e-4);
    cfg.monitor_stride = 20;
    cfg.snapshot_stride = 200;
    auto traj = evolve(gaussian2d(g, 1.2, 2.5), cfg);
    auto rep = virial_contradiction_monitor(traj, 1.0, 0.1);
    INFO("defect " << rep.ftc_defect << " bound " << rep.ftc_bound);
    CHECK(rep.ftc_consistent);
    CHECK(rep.ratio > 0.0);
    CHECK_FALSE(rep.nonpositive_zpp);  // dispersing data has z'' ~ 8 K > 0
  }

  SECTION("soliton run: stationary z'' flags the non-coercive regime") {
    auto g = Grid::radial(3, 1024, 20.0);
    double alpha = 4.0 / 3.0;
    auto gs = solve_ground_state_raw(0.0, alpha, g, 1e-9, 5000, GroundStateBranch::Spectral);
    auto cfg = make_evolution_config(g, 0.0, alpha, 1.0, 1e-4);
    cfg.monitor_stride = 500;
    cfg.snapshot_stride = 1000;
    cfg.wraparound_guard = false;
    auto traj = evolve(gs.Q, cfg);
    auto rep = virial_contradiction_monitor(traj, 1.0, 0.1);
    INFO("max z'' relative to kinetic scale flagged: defect " << rep.ftc_defect);
    CHECK(rep.ftc_consistent);
    CHECK(rep.nonpositive_zpp);
  }
}

TEST_CASE("scattering diagnostic") {
  auto g = Grid::cartesian2d(128, 12.0);

  SECTION("free evolution is trivially scattering-consistent") {
    auto cfg = make_evolution_config(g, 0.5, 2.0, 1.0, 1e-3);
    std::fill(cfg.weight.samples.begin(), cfg.weight.samples.end(), 0.0);
    cfg.wraparound_guard = false;
    auto traj = evolve(gaussian2d(g), cfg);
    auto rep = scattering_diagnostic(traj);
    for (double d : rep.h1_distance_series) CHECK(d < 1e-10);
    CHECK(rep.verdict == ScatterVerdict::ScatteringConsistent);
  }

  SECTION("small data scatters") {
    auto gg = Grid::cartesian2d(256, 32.0);
    auto cfg = make_evolution_config(gg, 0.5, 2.0, 10.0, 5e-3);
    cfg.monitor_stride = 100;
    cfg.snapshot_stride = 200;
    cfg.wraparound_guard = false;
    auto u0 = sample_cartesian(gg, [](double x, double y) {
      return std::complex<double>(0.01 * std::exp(-(x * x + y * y) / 2.0), 0.0);
    });
    auto traj = evolve(u0, cfg);
    auto rep = scattering_diagnostic(traj);
    CHECK(rep.verdict == ScatterVerdict::ScatteringConsistent);
  }

  SECTION("soliton run is non-scattering: potential flat, verdict not consistent") {
    auto rg = Grid::radial(3, 1024, 20.0);
    double alpha = 4.0 / 3.0;
    auto gs = solve_ground_state_raw(0.0, alpha, rg, 1e-9, 5000, GroundStateBranch::Spectral);
    auto cfg = make_evolution_config(rg, 0.0, alpha, 1.0, 1e-4);
    cfg.monitor_stride = 500;
    cfg.snapshot_stride = 2500;
    cfg.wraparound_guard = false;
    auto traj = evolve(gs.Q, cfg);
    auto rep = scattering_diagnostic(traj);
    const auto& pot = rep.potential_series;
    for (double p : pot) CHECK(p == Catch::Approx(pot.front()).epsilon(1e-5));
    CHECK(rep.verdict != ScatterVerdict::ScatteringConsistent);
  }

  SECTION("guard violation forces an inconclusive verdict") {
    auto sg = Grid::cartesian2d(64, 4.0);
    auto cfg = make_evolution_config(sg, 0.5, 2.0, 1.0, 1e-3);
    cfg.snapshot_stride = 200;
    auto traj = evolve(sample_cartesian(sg, [](double x, double y) {
                         return std::complex<double>(0.01 * std::exp(-(x * x + y * y)), 0.0);
                       }),
                       cfg);
    CHECK(traj.guard_violated);
    auto rep = scattering_diagnostic(traj);
    CHECK(rep.verdict == ScatterVerdict::Inconclusive);
  }

  SECTION("gradient growth reports growth") {
    auto cfg = make_evolution_config(g, 0.5, 3.0, 5.0, 5e-4);
    cfg.monitor_stride = 4;
    cfg.snapshot_stride = 4;
    cfg.grad_growth_factor = 10.0;
    auto traj = evolve(gaussian2d(g, 4.0), cfg);
    REQUIRE(traj.status == RunStatus::GradientGrowth);
    auto rep = scattering_diagnostic(traj);
    CHECK(rep.verdict == ScatterVerdict::Growth);
  }
}

TEST_CASE("far-translation datum construction") {
  auto g = Grid::cartesian2d(256, 32.0);
  auto psi = gaussian2d(g);
  double grad_sup = 0;
  auto u0 = far_translation_datum(psi, 8.0, 0.5, &grad_sup);
  // Inner plateau: chi vanishes identically for |x| < offset / 4.
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.radius(i) < 2.0) CHECK(std::abs(u0.values[i]) == 0.0);
  // Outer plateau: the cutoff is inactive beyond offset / 2; the datum there
  // is exactly the projected translate, which carries nearly all the mass.
  CHECK(l2_norm(u0) == Catch::Approx(1.0 * l2_norm(psi)).epsilon(1e-3));
  // Gradient bound sup |grad chi| <= C / offset with C about 4 max S'.
  CHECK(grad_sup * 8.0 == Catch::Approx(9.84).margin(0.1));
  // Offset 0 is the untouched baseline.
  auto base = far_translation_datum(psi, 0.0, 0.5);
  CHECK(base.values == psi.values);
  CHECK_THROWS_AS(far_translation_datum(sample_radial(Grid::radial(3, 64, 8.0),
                                                      [](double) {
                                                        return std::complex<double>(1, 0);
                                                      }),
                                        4.0, 0.5),
                  std::invalid_argument);
}

TEST_CASE("far-translation deviations weaken with the offset") {
  auto g = Grid::cartesian2d(256, 32.0);
  auto psi = gaussian2d(g);
  auto cfg = make_evolution_config(g, 0.5, 3.0, 1.0, 1e-3);
  cfg.monitor_stride = 100;
  cfg.snapshot_stride = 200;
  auto table = far_translation_experiment(psi, {0.0, 4.0, 8.0, 16.0, 40.0}, 0.5, 2.0, cfg);
  REQUIRE(table.rows.size() == 5);
  // The absurd offset cannot fit the box and is skipped, not an error.
  CHECK(table.rows[4].skipped);
  for (int k = 0; k < 4; ++k) CHECK_FALSE(table.rows[k].skipped);
  // Baseline row (offset 0) carries the full nonlinear effect; deviations are
  // nonincreasing across usable rows.
  for (int k = 0; k + 1 < 4; ++k)
    CHECK(table.rows[k + 1].deviation <= table.rows[k].deviation + 1e-9);
  CHECK(table.loglog_slope < 0.0);
}
