#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "inls/cli.hpp"

using namespace inls;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("inls-cli-" + std::to_string(::getpid()) + "-" +
            std::to_string(++counter()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

const char* kEvolveConfig = R"(
[params]
b = 0.5
alpha = 2

[grid]
mode = cartesian
points = 64
extent = 8

[initial]
kind = gaussian
amplitude = 0.5

[evolution]
dt = 1e-3
t_final = 0.2
monitor_stride = 20
snapshot_stride = 100
wraparound_guard = false
)";

}  // namespace

TEST_CASE("config text round-trips losslessly") {
  std::string text = R"(
# comment
[params]
N = 2
b = 1/2

[grid]
mode = cartesian
points = 128

[notes]
)";
  auto cfg = parse_config(text);
  CHECK(*cfg.find("params", "b") == "1/2");
  CHECK(cfg.has_section("notes"));
  auto again = parse_config(serialize(cfg));
  CHECK(serialize(again) == serialize(cfg));
  CHECK(again.sections == cfg.sections);
}

TEST_CASE("config parse and access errors") {
  CHECK_THROWS_AS(parse_config("key = 1\n"), ConfigError);          // key before section
  CHECK_THROWS_AS(parse_config("[params\nb = 1\n"), ConfigError);   // unterminated header
  CHECK_THROWS_AS(parse_config("[params]\njust a line\n"), ConfigError);
  auto cfg = parse_config("[params]\nb = 1/0\nc = hello\nflagged = maybe\n");
  CHECK_THROWS_AS(cfg.rational("params", "b"), ConfigError);
  CHECK_THROWS_AS(cfg.num("params", "c", 0.0), ConfigError);
  CHECK_THROWS_AS(cfg.flag("params", "flagged", false), ConfigError);
  CHECK_THROWS_AS(cfg.require("params", "missing"), ConfigError);
  CHECK(cfg.num("params", "absent", 7.0) == 7.0);
}

TEST_CASE("command-line overrides") {
  auto cfg = parse_config("[params]\nb = 1/2\n");
  cfg.apply_override("params.b=2/3");
  cfg.apply_override("grid.points=256");
  CHECK(*cfg.find("params", "b") == "2/3");
  CHECK(cfg.integer("grid", "points", 0) == 256);
  CHECK_THROWS_AS(cfg.apply_override("no-dot-or-equals"), ConfigError);
}

TEST_CASE("certify pipeline") {
  TempDir tmp;
  SECTION("hypothesis-region sample certifies all-pass") {
    auto cfg = parse_config(
        "[params]\nN = 2\nb = 1/2\nalpha = 3\ntheta = 1/10\nepsilon = 1/10\n");
    json err, rep;
    CHECK(execute_run("certify", cfg, tmp.path / "a", &err, &rep) == 0);
    CHECK(rep["all_pass"] == true);
    CHECK(rep["params"]["regime"] == "intercritical");
    CHECK(rep["pairs"].size() >= 4);
    for (const auto& p : rep["pairs"]) CHECK(p["admissible"] == true);
    for (const auto& r : rep["relations"]) CHECK(r["holds"] == true);
    CHECK(fs::exists(tmp.path / "a" / "certify.json"));
    CHECK(fs::exists(tmp.path / "a" / "config.ini"));  // resolved config beside outputs
    CHECK(fs::exists(tmp.path / "a" / "manifest.json"));
  }
  SECTION("malformed rational is a structured config error, exit 2") {
    auto cfg = parse_config(
        "[params]\nN = 2\nb = 1/0\nalpha = 3\ntheta = 1/10\nepsilon = 1/10\n");
    json err;
    CHECK(execute_run("certify", cfg, tmp.path / "b", &err) == 2);
    CHECK(err["kind"] == "config");
    CHECK(err["exit"] == 2);
    CHECK(err["error"].get<std::string>().find("1/0") != std::string::npos);
  }
  SECTION("unknown subcommand is a config error") {
    json err;
    CHECK(execute_run("frobnicate", {}, tmp.path / "c", &err) == 2);
  }
}

TEST_CASE("groundstate pipeline writes snapshot, profile and scalars") {
  TempDir tmp;
  auto cfg = parse_config(R"(
[params]
b = 0.5
alpha = 2
[grid]
mode = radial
dimension = 3
points = 1024
extent = 16
)");
  json err, rep;
  REQUIRE(execute_run("groundstate", cfg, tmp.path / "gs", &err, &rep) == 0);
  CHECK(rep["residual"].get<double>() < 1e-9);
  auto Q = read_snapshot((tmp.path / "gs" / "Q.bin").string());
  CHECK(Q.grid.mode == GridMode::Radial);
  CHECK(l2_norm_sq(Q) == Catch::Approx(rep["mass"].get<double>()).epsilon(1e-12));
  std::string csv = slurp(tmp.path / "gs" / "Q.csv");
  CHECK(csv.rfind("r,re,im,abs\n", 0) == 0);
}

TEST_CASE("evolve pipeline persists the trajectory") {
  TempDir tmp;
  auto cfg = parse_config(kEvolveConfig);
  json err, rep;
  REQUIRE(execute_run("evolve", cfg, tmp.path / "ev", &err, &rep) == 0);
  CHECK(rep["status"] == "completed");
  CHECK(rep["mass_drift"].get<double>() < 1e-10);
  // monitor.csv: header + one row per monitor sample.
  std::string csv = slurp(tmp.path / "ev" / "monitor.csv");
  std::size_t lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == rep["monitor_samples"].get<std::size_t>() + 1);
  CHECK(csv.rfind("time,", 0) == 0);
  // snapshots round-trip through the binary format with their timestamps.
  auto snaps = rep["snapshots"];
  REQUIRE(snaps.size() == 3);  // t = 0, 0.1, 0.2
  SnapshotMeta meta;
  auto last = read_snapshot((tmp.path / "ev" / snaps.back()["file"].get<std::string>()).string(),
                            &meta);
  CHECK(meta.timestamp == Catch::Approx(0.2));
  CHECK(meta.b == 0.5);
  CHECK(last.grid.points == 64);
}

TEST_CASE("determinism: identical config gives bit-identical monitor CSVs") {
  TempDir tmp;
  auto cfg = parse_config(kEvolveConfig);
  json err;
  REQUIRE(execute_run("evolve", cfg, tmp.path / "r1", &err) == 0);
  REQUIRE(execute_run("evolve", cfg, tmp.path / "r2", &err) == 0);
  CHECK(slurp(tmp.path / "r1" / "monitor.csv") == slurp(tmp.path / "r2" / "monitor.csv"));
}

TEST_CASE("classify and virial pipelines") {
  TempDir tmp;
  auto cfg = parse_config(R"(
[params]
b = 0.5
alpha = 2
[grid]
mode = radial
dimension = 3
points = 1024
extent = 16
[initial]
kind = ground-state
amplitude = 0.5
)");
  json err, rep;
  REQUIRE(execute_run("classify", cfg, tmp.path / "cl", &err, &rep) == 0);
  CHECK(rep["threshold"]["classification"] == "sub-threshold");
  CHECK(rep["threshold"]["grad_ratio"].get<double>() == Catch::Approx(0.5).epsilon(1e-6));
  CHECK(rep["coercivity"]["applicable"] == true);

  auto vcfg = parse_config(kEvolveConfig);
  json vrep;
  REQUIRE(execute_run("virial", vcfg, tmp.path / "vi", &err, &vrep) == 0);
  CHECK(vrep["virial"]["ftc_consistent"] == true);
  CHECK(fs::exists(tmp.path / "vi" / "monitor.csv"));
}

TEST_CASE("scatter-test pipeline on small data") {
  TempDir tmp;
  auto cfg = parse_config(R"(
[params]
b = 0.5
alpha = 2
[grid]
mode = cartesian
points = 128
extent = 16
[initial]
kind = gaussian
amplitude = 0.01
[evolution]
dt = 2e-3
t_final = 4
monitor_stride = 100
snapshot_stride = 200
)");
  json err, rep;
  REQUIRE(execute_run("scatter-test", cfg, tmp.path / "sc", &err, &rep) == 0);
  CHECK(rep["scatter"]["verdict"] == "scattering-consistent");
  auto up = read_snapshot((tmp.path / "sc" / "u_plus.bin").string());
  CHECK(l2_norm(up) == Catch::Approx(0.01 * std::sqrt(std::numbers::pi * 16 * 16 / 256.0))
                           .epsilon(0.5));  // sanity: mass scale survived
  CHECK(fs::exists(tmp.path / "sc" / "h1_distance.csv"));
}

TEST_CASE("amplitude sweep: classification flips exactly once across c = 1") {
  auto cfg = parse_config(R"(
[params]
b = 0.5
alpha = 2
[grid]
mode = radial
dimension = 3
points = 1024
extent = 16
)");
  auto rows = sweep_rows(cfg, "amplitude", {0.2, 0.5, 0.8, 0.95, 1.05, 1.2, 1.4}, 4);
  REQUIRE(rows.size() == 7);
  int flips = 0;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    bool sub_k = rows[k].record["classification"] == "sub-threshold";
    bool sub_n = rows[k + 1].record["classification"] == "sub-threshold";
    if (sub_k != sub_n) ++flips;
    CHECK(rows[k].error.empty());
  }
  CHECK(flips == 1);
  // grad_ratio is exactly linear in the amplitude.
  for (const auto& r : rows)
    CHECK(r.record["grad_ratio"].get<double>() == Catch::Approx(r.value).epsilon(1e-6));
}

TEST_CASE("sweep edge cases") {
  TempDir tmp;
  SECTION("empty values list: header-only CSV, success") {
    auto cfg = parse_config("[sweep]\naxis = amplitude\nvalues =\n[grid]\nmode = radial\n"
                            "dimension = 3\npoints = 512\nextent = 16\n[params]\nb = 0.5\n"
                            "alpha = 2\n");
    json err, rep;
    REQUIRE(execute_run("sweep", cfg, tmp.path / "e", &err, &rep) == 0);
    std::string csv = slurp(tmp.path / "e" / "sweep.csv");
    CHECK(csv ==
          "value,classification,ME_ratio,grad_ratio,energy,coercivity_applicable,error\n");
  }
  SECTION("unknown axis is a config error") {
    auto cfg = parse_config("[sweep]\naxis = banana\nvalues = 1\n");
    json err;
    CHECK(execute_run("sweep", cfg, tmp.path / "x", &err) == 2);
  }
}

TEST_CASE("sweep crash isolation: one failed row never aborts siblings") {
  auto cfg = parse_config(R"(
[params]
b = 0.5
alpha = 2
[grid]
mode = cartesian
points = 64
extent = 8
[evolution]
dt = 1e-3
t_final = 0.4
monitor_stride = 20
snapshot_stride = 100
[sweep]
with_scattering = true
[diagnostics]
settle_tol = 1e9
decay_factor = 1
)");
  // The NaN amplitude aborts its evolution at the first monitor sample, so
  // its scattering diagnostic throws (too few snapshots); siblings proceed.
  auto rows = sweep_rows(cfg, "amplitude", {0.2, std::nan(""), 0.3}, 2);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].error.empty());
  CHECK_FALSE(rows[1].error.empty());
  CHECK(rows[2].error.empty());
  CHECK(rows[0].record.contains("verdict"));
}

TEST_CASE("offset sweep delegates to the far-translation experiment") {
  auto cfg = parse_config(R"(
[params]
b = 0.5
alpha = 3
[grid]
mode = cartesian
points = 256
extent = 32
[initial]
kind = gaussian
[evolution]
dt = 2e-3
t_final = 0.5
monitor_stride = 50
snapshot_stride = 50
[diagnostics]
theta = 0.5
)");
  auto rows = sweep_rows(cfg, "offset", {4.0, 8.0, 100.0}, 1);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].record["deviation"].get<double>() > rows[1].record["deviation"].get<double>());
  CHECK(rows[2].record["skipped"] == true);
}

TEST_CASE("builder validation errors") {
  auto cfg = parse_config("[grid]\nmode = hexagonal\n");
  CHECK_THROWS_AS(grid_from_config(cfg), ConfigError);
  auto cfg2 = parse_config("[initial]\nkind = dragon\n");
  CHECK_THROWS_AS(initial_from_config(cfg2, Grid::cartesian2d(32, 4.0)), ConfigError);
  auto cfg3 = parse_config("[evolution]\nvirial_kind = cubic\n");
  CHECK_THROWS_AS(evolution_from_config(cfg3, Grid::cartesian2d(32, 4.0)), ConfigError);
  auto cfg4 = parse_config("[groundstate]\nbranch = sideways\n");
  CHECK_THROWS_AS(branch_from_config(cfg4), ConfigError);
}
