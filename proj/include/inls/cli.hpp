#pragma once

// Config-driven batch runner: the flat sectioned key-value config format,
// the per-subcommand pipelines (certify | groundstate | evolve | classify |
// virial | scatter-test | far-translate | sweep) and trajectory persistence
// (JSON manifest + monitor CSV + strided binary snapshots).
//
// Exit-code contract: 0 success, 1 run failure, 2 config error.  Config
// errors throw ConfigError, everything else that goes wrong during a run
// surfaces as RunError (or any std::exception from the library).

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "inls/diagnostics.hpp"
#include "inls/params.hpp"
#include "inls/random.hpp"
#include "inls/snapshot.hpp"

namespace inls {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RunError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// ExperimentConfig: flat key-value text with explicit [section] headers.
// Order-preserving so a config round-trips losslessly through serialize().

struct ExperimentConfig {
  using Section = std::vector<std::pair<std::string, std::string>>;
  std::vector<std::pair<std::string, Section>> sections;

  bool has_section(const std::string& sec) const {
    for (const auto& s : sections)
      if (s.first == sec) return true;
    return false;
  }

  const std::string* find(const std::string& sec, const std::string& key) const {
    for (const auto& s : sections)
      if (s.first == sec)
        for (const auto& kv : s.second)
          if (kv.first == key) return &kv.second;
    return nullptr;
  }

  void set(const std::string& sec, const std::string& key, const std::string& value) {
    for (auto& s : sections)
      if (s.first == sec) {
        for (auto& kv : s.second)
          if (kv.first == key) {
            kv.second = value;
            return;
          }
        s.second.emplace_back(key, value);
        return;
      }
    sections.push_back({sec, {{key, value}}});
  }

  std::string str(const std::string& sec, const std::string& key, const std::string& dflt) const {
    const std::string* v = find(sec, key);
    return v ? *v : dflt;
  }
  std::string require(const std::string& sec, const std::string& key) const {
    const std::string* v = find(sec, key);
    if (!v) throw ConfigError("missing required key " + sec + "." + key);
    return *v;
  }
  double num(const std::string& sec, const std::string& key, double dflt) const {
    const std::string* v = find(sec, key);
    if (!v) return dflt;
    try {
      std::size_t used = 0;
      double d = std::stod(*v, &used);
      if (used != v->size()) throw std::invalid_argument("trailing characters");
      return d;
    } catch (const std::exception&) {
      // allow exact rational spellings like "1/2" for numeric keys
      if (auto r = parse_rational(*v)) return to_double(*r);
      throw ConfigError("bad number for " + sec + "." + key + ": '" + *v + "'");
    }
  }
  long integer(const std::string& sec, const std::string& key, long dflt) const {
    double d = num(sec, key, double(dflt));
    long l = std::lround(d);
    if (double(l) != d) throw ConfigError("expected integer for " + sec + "." + key);
    return l;
  }
  bool flag(const std::string& sec, const std::string& key, bool dflt) const {
    const std::string* v = find(sec, key);
    if (!v) return dflt;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError("bad boolean for " + sec + "." + key + ": '" + *v + "'");
  }
  Rational rational(const std::string& sec, const std::string& key) const {
    std::string v = require(sec, key);
    auto r = parse_rational(v);
    if (!r) throw ConfigError("bad rational for " + sec + "." + key + ": '" + v + "'");
    return *r;
  }
  std::vector<double> numbers(const std::string& sec, const std::string& key) const {
    const std::string* v = find(sec, key);
    std::vector<double> out;
    if (!v) return out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      // trim
      auto a = item.find_first_not_of(" \t");
      auto b = item.find_last_not_of(" \t");
      if (a == std::string::npos) continue;
      item = item.substr(a, b - a + 1);
      try {
        out.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ConfigError("bad number list for " + sec + "." + key + ": '" + *v + "'");
      }
    }
    return out;
  }

  /// "section.key=value" command-line override.
  void apply_override(const std::string& expr) {
    auto eq = expr.find('=');
    auto dot = expr.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("override must look like section.key=value, got '" + expr + "'");
    set(expr.substr(0, dot), expr.substr(dot + 1, eq - dot - 1), expr.substr(eq + 1));
  }
};

inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::string section;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    auto a = s.find_first_not_of(" \t\r");
    auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty section");
      if (!cfg.has_section(section))  // keep empty sections through round trips
        cfg.sections.push_back({section, {}});
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key before any [section]");
    cfg.set(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

inline std::string serialize(const ExperimentConfig& cfg) {
  std::ostringstream os;
  for (const auto& s : cfg.sections) {
    os << '[' << s.first << "]\n";
    for (const auto& kv : s.second) os << kv.first << " = " << kv.second << '\n';
    os << '\n';
  }
  return os.str();
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// builders shared by the pipelines

inline Grid grid_from_config(const ExperimentConfig& cfg) {
  std::string mode = cfg.str("grid", "mode", "cartesian");
  int points = int(cfg.integer("grid", "points", 128));
  double extent = cfg.num("grid", "extent", 12.0);
  if (mode == "cartesian") return Grid::cartesian2d(points, extent);
  if (mode == "radial")
    return Grid::radial(int(cfg.integer("grid", "dimension", 3)), points, extent);
  throw ConfigError("grid.mode must be cartesian or radial, got '" + mode + "'");
}

inline GroundStateBranch branch_from_config(const ExperimentConfig& cfg) {
  std::string s = cfg.str("groundstate", "branch", "auto");
  if (s == "auto") return GroundStateBranch::Auto;
  if (s == "spectral") return GroundStateBranch::Spectral;
  if (s == "integral") return GroundStateBranch::Integral;
  throw ConfigError("groundstate.branch must be auto | spectral | integral");
}

inline GroundState ground_state_from_config(const ExperimentConfig& cfg, const Grid& g) {
  return solve_ground_state_raw(cfg.num("params", "b", 0.5), cfg.num("params", "alpha", 2.0), g,
                                cfg.num("groundstate", "tol", 1e-10),
                                int(cfg.integer("groundstate", "max_iter", 5000)),
                                branch_from_config(cfg));
}

/// Initial datum per the [initial] section: kind = gaussian | ground-state |
/// random, scaled by amplitude.  The ground-state kind solves on the run's
/// grid with the [params] exponents; random uses [run] seed.
inline SpectralField initial_from_config(const ExperimentConfig& cfg, const Grid& g) {
  std::string kind = cfg.str("initial", "kind", "gaussian");
  double amp = cfg.num("initial", "amplitude", 1.0);
  if (kind == "gaussian") {
    double width = cfg.num("initial", "width", 1.0);
    double cx = cfg.num("initial", "center_x", 0.0);
    if (g.mode == GridMode::Cartesian2D)
      return sample_cartesian(g, [&](double x, double y) {
        double d = (x - cx) * (x - cx) + y * y;
        return std::complex<double>(amp * std::exp(-d / (2.0 * width * width)), 0.0);
      });
    if (cx != 0.0) throw ConfigError("initial.center_x requires a cartesian grid");
    return sample_radial(g, [&](double r) {
      return std::complex<double>(amp * std::exp(-r * r / (2.0 * width * width)), 0.0);
    });
  }
  if (kind == "ground-state") {
    GroundState gs = ground_state_from_config(cfg, g);
    SpectralField u = gs.Q;
    for (auto& v : u.values) v *= amp;
    return u;
  }
  if (kind == "random") {
    std::uint64_t seed = std::uint64_t(cfg.integer("run", "seed", 1));
    SpectralField u = g.mode == GridMode::Cartesian2D ? random_smooth_field(g, seed)
                                                      : random_radial_bumps(g, seed);
    for (auto& v : u.values) v *= amp;
    return u;
  }
  throw ConfigError("initial.kind must be gaussian | ground-state | random");
}

inline EvolutionConfig evolution_from_config(const ExperimentConfig& cfg, const Grid& g,
                                             bool guard_default = true) {
  double b = cfg.num("params", "b", 0.5);
  double alpha = cfg.num("params", "alpha", 2.0);
  EvolutionConfig e = make_evolution_config(g, b, alpha, cfg.num("evolution", "t_final", 1.0),
                                            cfg.num("evolution", "dt", 1e-3));
  e.monitor_stride = int(cfg.integer("evolution", "monitor_stride", 10));
  e.snapshot_stride = int(cfg.integer("evolution", "snapshot_stride", 100));
  e.wraparound_guard = cfg.flag("evolution", "wraparound_guard", guard_default);
  e.guard_threshold = cfg.num("evolution", "guard_threshold", 1e-6);
  e.grad_growth_factor = cfg.num("evolution", "grad_growth_factor", 100.0);
  std::string vk = cfg.str("evolution", "virial_kind", "quadratic");
  double vR = cfg.num("evolution", "virial_R", 1.0);
  if (vk == "localized")
    e.virial = make_virial_weight(g, VirialWeight::Kind::Localized, vR);
  else if (vk == "quadratic")
    e.virial = make_virial_weight(g, VirialWeight::Kind::Quadratic, vR);
  else
    throw ConfigError("evolution.virial_kind must be quadratic | localized");
  return e;
}

// ---------------------------------------------------------------------------
// persistence helpers

namespace detail {

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p);
  if (!os) throw RunError("cannot write " + p.string());
  os << text;
  if (!os) throw RunError("write failed for " + p.string());
}

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Persists a trajectory: monitor.csv (one row per monitor sample, channels
/// in sorted order), snapshot-%06d.bin files, and a JSON manifest.  Returns
/// the manifest.
inline json write_trajectory(const std::filesystem::path& dir, const Trajectory& traj, double b) {
  std::ostringstream csv;
  csv << "time";
  for (const auto& [name, _] : traj.channels) csv << ',' << name;
  csv << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    csv << detail::fmt17(traj.times[k]);
    for (const auto& [_, series] : traj.channels) csv << ',' << detail::fmt17(series[k]);
    csv << '\n';
  }
  detail::write_text(dir / "monitor.csv", csv.str());

  json manifest;
  manifest["status"] = to_string(traj.status);
  manifest["abort_time"] = traj.abort_time;
  manifest["guard_violated"] = traj.guard_violated;
  manifest["guard_time"] = traj.guard_time;
  manifest["monitor_csv"] = "monitor.csv";
  manifest["monitor_samples"] = traj.times.size();
  manifest["channels"] = [&] {
    std::vector<std::string> names;
    for (const auto& [name, _] : traj.channels) names.push_back(name);
    return names;
  }();
  json snaps = json::array();
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot-%06zu.bin", k);
    write_snapshot((dir / name).string(), traj.snapshots[k], {b, traj.snapshot_times[k]});
    snaps.push_back({{"file", name}, {"time", traj.snapshot_times[k]}});
  }
  manifest["snapshots"] = snaps;
  return manifest;
}

// ---------------------------------------------------------------------------
// pipelines; each returns the JSON report it also writes into `dir`

inline json run_certify(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  int N = int(cfg.integer("params", "N", 2));
  Rational b = cfg.rational("params", "b");
  Rational alpha = cfg.rational("params", "alpha");
  auto pr = validate_params(N, b, alpha);
  json rep;
  rep["params"] = {{"N", N},
                   {"b", to_string(b)},
                   {"alpha", to_string(alpha)},
                   {"regime", pr.regime},
                   {"ok", pr.ok},
                   {"violations", pr.violations}};
  if (pr.ok) {
    rep["params"]["s_c"] = to_string(pr.params.s_c);
    Rational theta = cfg.rational("params", "theta");
    Rational epsilon = cfg.rational("params", "epsilon");
    auto fam = build_exponent_family(pr.params, theta, epsilon);
    rep["theta"] = to_string(theta);
    rep["epsilon"] = to_string(epsilon);
    json pairs = json::array();
    for (const auto& p : fam.pairs)
      pairs.push_back({{"name", p.name},
                       {"q", to_string(p.q)},
                       {"r", to_string(p.r)},
                       {"s", to_string(p.s)},
                       {"kind", kind_name(p.kind)},
                       {"admissible", p.verdict.admissible},
                       {"failed", p.verdict.failed}});
    json rels = json::array();
    for (const auto& r : fam.relations)
      rels.push_back({{"name", r.name},
                      {"lhs", to_string(r.lhs)},
                      {"rhs", to_string(r.rhs)},
                      {"holds", r.holds}});
    rep["pairs"] = pairs;
    rep["relations"] = rels;
    rep["all_pass"] = fam.all_pass();
    auto w = theta_window(pr.params);
    rep["theta_window"] = {{"empty", w.empty},
                           {"certified", w.empty ? "" : to_string(w.certified)},
                           {"upper", w.empty ? "" : to_string(w.upper)}};
  }
  detail::write_text(dir / "certify.json", rep.dump(2) + "\n");
  return rep;
}

inline json run_groundstate(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  Grid g = grid_from_config(cfg);
  GroundState gs = ground_state_from_config(cfg, g);
  write_snapshot((dir / "Q.bin").string(), gs.Q, {cfg.num("params", "b", 0.5), 0.0});
  detail::write_text(dir / "Q.csv", radial_profile_csv(gs.Q));
  json rep = {{"mass", gs.mass},
              {"kinetic", gs.kinetic},
              {"potential", gs.potential},
              {"energy", gs.energy},
              {"residual", gs.residual},
              {"gn_constant", gs.gn_constant},
              {"threshold_ME", gs.threshold_ME},
              {"threshold_grad", gs.threshold_grad},
              {"iterations", gs.m_history.size()},
              {"final_m", gs.final_m},
              {"snapshot", "Q.bin"},
              {"profile_csv", "Q.csv"}};
  detail::write_text(dir / "groundstate.json", rep.dump(2) + "\n");
  return rep;
}

inline json run_evolve(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  Grid g = grid_from_config(cfg);
  EvolutionConfig e = evolution_from_config(cfg, g);
  Trajectory traj = evolve(initial_from_config(cfg, g), e);
  json rep = write_trajectory(dir, traj, cfg.num("params", "b", 0.5));
  const auto& mass = traj.channels.at("mass");
  const auto& energy = traj.channels.at("energy");
  auto drift = [](const dvec& c) {
    double base = c.front(), w = 0;
    for (double v : c) w = std::max(w, std::abs(v - base));
    return w / std::max(std::abs(base), 1e-300);
  };
  rep["mass_drift"] = drift(mass);
  rep["energy_drift"] = drift(energy);
  detail::write_text(dir / "evolve.json", rep.dump(2) + "\n");
  return rep;
}

inline json threshold_to_json(const ThresholdReport& t) {
  return {{"mass", t.mass},
          {"kinetic", t.kinetic},
          {"potential", t.potential},
          {"energy", t.energy},
          {"ME_ratio", t.ME_ratio},
          {"grad_ratio", t.grad_ratio},
          {"classification", to_string(t.classification)},
          {"band", t.band},
          {"finalstate_ratio", t.finalstate_ratio},
          {"finalstate_ok", t.finalstate_ok}};
}

inline json run_classify(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  Grid g = grid_from_config(cfg);
  GroundState gs = ground_state_from_config(cfg, g);
  SpectralField u0 = initial_from_config(cfg, g);
  double b = cfg.num("params", "b", 0.5), alpha = cfg.num("params", "alpha", 2.0);
  auto co = coercivity_check(u0, gs, b, alpha);
  json rep;
  rep["threshold"] = threshold_to_json(co.threshold);
  rep["coercivity"] = {{"applicable", co.applicable},
                       {"energy_ratio", co.energy_ratio},
                       {"gap", co.gap},
                       {"item3_value", co.item3_value},
                       {"item3_ratio", co.item3_ratio}};
  detail::write_text(dir / "classify.json", rep.dump(2) + "\n");
  return rep;
}

inline json run_virial(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  Grid g = grid_from_config(cfg);
  EvolutionConfig e = evolution_from_config(cfg, g);
  Trajectory traj = evolve(initial_from_config(cfg, g), e);
  json rep = write_trajectory(dir, traj, cfg.num("params", "b", 0.5));
  auto mon = virial_contradiction_monitor(traj, e.virial.R,
                                          cfg.num("diagnostics", "delta_probe", 0.1));
  rep["virial"] = {{"ftc_defect", mon.ftc_defect},
                   {"ftc_bound", mon.ftc_bound},
                   {"ftc_consistent", mon.ftc_consistent},
                   {"channel_defect", mon.channel_defect},
                   {"ratio", mon.ratio},
                   {"nonpositive_zpp", mon.nonpositive_zpp}};
  detail::write_text(dir / "virial.json", rep.dump(2) + "\n");
  return rep;
}

inline json run_scatter_test(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  Grid g = grid_from_config(cfg);
  // Scattering runs send the solution to the box boundary by design, so the
  // wrap-around guard defaults off here (it can be re-enabled in [evolution]).
  EvolutionConfig e = evolution_from_config(cfg, g, /*guard_default=*/false);
  Trajectory traj = evolve(initial_from_config(cfg, g), e);
  json rep = write_trajectory(dir, traj, cfg.num("params", "b", 0.5));
  auto sc = scattering_diagnostic(traj, cfg.num("diagnostics", "settle_tol", 1e-3),
                                  cfg.num("diagnostics", "decay_factor", 100.0));
  write_snapshot((dir / "u_plus.bin").string(), sc.u_plus, {cfg.num("params", "b", 0.5), 0.0});
  std::ostringstream csv;
  csv << "time,h1_distance\n";
  for (std::size_t k = 0; k < sc.snapshot_times.size(); ++k)
    csv << detail::fmt17(sc.snapshot_times[k]) << ',' << detail::fmt17(sc.h1_distance_series[k])
        << '\n';
  detail::write_text(dir / "h1_distance.csv", csv.str());
  rep["scatter"] = {{"verdict", to_string(sc.verdict)},
                    {"settle_tol", sc.settle_tol},
                    {"decay_factor", sc.decay_factor},
                    {"final_h1_distance", sc.h1_distance_series.back()},
                    {"u_plus", "u_plus.bin"},
                    {"h1_distance_csv", "h1_distance.csv"}};
  detail::write_text(dir / "scatter.json", rep.dump(2) + "\n");
  return rep;
}

inline json run_far_translate(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  Grid g = grid_from_config(cfg);
  SpectralField psi = initial_from_config(cfg, g);
  auto offsets = cfg.numbers("diagnostics", "offsets");
  if (offsets.empty()) throw ConfigError("far-translate needs diagnostics.offsets");
  double theta = cfg.num("diagnostics", "theta", 0.5);
  EvolutionConfig e = evolution_from_config(cfg, g, /*guard_default=*/false);
  auto table = far_translation_experiment(psi, offsets, theta, e.t_final, e);
  std::ostringstream csv;
  csv << "offset,deviation,chi_grad_sup,skipped\n";
  json rows = json::array();
  for (const auto& r : table.rows) {
    csv << detail::fmt17(r.offset) << ',' << detail::fmt17(r.deviation) << ','
        << detail::fmt17(r.chi_grad_sup) << ',' << (r.skipped ? 1 : 0) << '\n';
    rows.push_back({{"offset", r.offset},
                    {"deviation", r.deviation},
                    {"chi_grad_sup", r.chi_grad_sup},
                    {"skipped", r.skipped}});
  }
  detail::write_text(dir / "far-translate.csv", csv.str());
  json rep = {{"rows", rows}, {"loglog_slope", table.loglog_slope},
              {"theta", theta}, {"csv", "far-translate.csv"}};
  detail::write_text(dir / "far-translate.json", rep.dump(2) + "\n");
  return rep;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepRow {
  double value = 0;
  json record;        // axis-dependent payload
  std::string error;  // non-empty when this row failed (siblings unaffected)
};

/// Independent runs over one axis, executed concurrently; per-row failures
/// are isolated into the row's error column.  Rows come back in value order
/// regardless of scheduling.
inline std::vector<SweepRow> sweep_rows(const ExperimentConfig& cfg, const std::string& axis,
                                        const std::vector<double>& values, int jobs) {
  std::vector<SweepRow> rows(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) rows[i].value = values[i];

  if (axis == "offset") {
    // Delegates to the far-translation experiment (sequential by nature:
    // one table, one row per offset).
    Grid g = grid_from_config(cfg);
    SpectralField psi = initial_from_config(cfg, g);
    EvolutionConfig e = evolution_from_config(cfg, g, /*guard_default=*/false);
    auto table = far_translation_experiment(psi, values, cfg.num("diagnostics", "theta", 0.5),
                                            e.t_final, e);
    for (std::size_t i = 0; i < values.size(); ++i) {
      rows[i].record = {{"deviation", table.rows[i].deviation},
                        {"chi_grad_sup", table.rows[i].chi_grad_sup},
                        {"skipped", table.rows[i].skipped}};
    }
    return rows;
  }
  if (axis != "amplitude" && axis != "b" && axis != "alpha")
    throw ConfigError("sweep.axis must be amplitude | b | alpha | offset");

  bool with_scattering = cfg.flag("sweep", "with_scattering", false);
  Grid g = grid_from_config(cfg);
  // The amplitude axis shares one ground state across rows.
  std::optional<GroundState> shared_gs;
  if (axis == "amplitude") shared_gs = ground_state_from_config(cfg, g);

  auto run_row = [&](SweepRow& row) {
    ExperimentConfig local = cfg;
    if (axis == "amplitude")
      local.set("initial", "amplitude", detail::fmt17(row.value));
    else
      local.set("params", axis, detail::fmt17(row.value));
    double b = local.num("params", "b", 0.5), alpha = local.num("params", "alpha", 2.0);
    GroundState gs = (axis == "amplitude") ? *shared_gs : ground_state_from_config(local, g);
    SpectralField u0;
    if (axis == "amplitude") {
      u0 = gs.Q;
      for (auto& v : u0.values) v *= row.value;
    } else {
      u0 = initial_from_config(local, g);
    }
    auto co = coercivity_check(u0, gs, b, alpha);
    row.record = {{"classification", to_string(co.threshold.classification)},
                  {"ME_ratio", co.threshold.ME_ratio},
                  {"grad_ratio", co.threshold.grad_ratio},
                  {"energy", co.threshold.energy},
                  {"coercivity_applicable", co.applicable}};
    if (with_scattering) {
      EvolutionConfig e = evolution_from_config(local, g, /*guard_default=*/false);
      Trajectory traj = evolve(u0, e);
      auto sc = scattering_diagnostic(traj, local.num("diagnostics", "settle_tol", 1e-3),
                                      local.num("diagnostics", "decay_factor", 100.0));
      row.record["verdict"] = to_string(sc.verdict);
      row.record["status"] = to_string(traj.status);
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= rows.size()) return;
      try {
        run_row(rows[i]);
      } catch (const std::exception& ex) {
        rows[i].error = ex.what();
      }
    }
  };
  int n = std::max(1, std::min<int>(jobs, int(rows.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

inline json run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  std::string axis = cfg.str("sweep", "axis", "amplitude");
  auto values = cfg.numbers("sweep", "values");
  int jobs = int(cfg.integer("sweep", "jobs", long(std::thread::hardware_concurrency())));
  auto rows = sweep_rows(cfg, axis, values, jobs);

  // Aggregated CSV: header always, one row per value.
  std::vector<std::string> cols;
  if (axis == "offset")
    cols = {"deviation", "chi_grad_sup", "skipped"};
  else {
    cols = {"classification", "ME_ratio", "grad_ratio", "energy", "coercivity_applicable"};
    if (cfg.flag("sweep", "with_scattering", false)) {
      cols.push_back("verdict");
      cols.push_back("status");
    }
  }
  std::ostringstream csv;
  csv << "value";
  for (const auto& c : cols) csv << ',' << c;
  csv << ",error\n";
  auto cell = [](const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (v.is_number()) return detail::fmt17(v.get<double>());
    return "";
  };
  json jrows = json::array();
  for (const auto& r : rows) {
    csv << detail::fmt17(r.value);
    for (const auto& c : cols)
      csv << ',' << (r.error.empty() && r.record.contains(c) ? cell(r.record.at(c)) : "");
    csv << ',' << r.error << '\n';
    json jr = r.record;
    jr["value"] = r.value;
    jr["error"] = r.error;
    jrows.push_back(jr);
  }
  detail::write_text(dir / "sweep.csv", csv.str());
  json rep = {{"axis", axis}, {"rows", jrows}, {"csv", "sweep.csv"}};
  detail::write_text(dir / "sweep.json", rep.dump(2) + "\n");
  return rep;
}

// ---------------------------------------------------------------------------
// dispatch

inline json run_subcommand(const std::string& name, const ExperimentConfig& cfg,
                           const std::filesystem::path& dir) {
  if (name == "certify") return run_certify(cfg, dir);
  if (name == "groundstate") return run_groundstate(cfg, dir);
  if (name == "evolve") return run_evolve(cfg, dir);
  if (name == "classify") return run_classify(cfg, dir);
  if (name == "virial") return run_virial(cfg, dir);
  if (name == "scatter-test") return run_scatter_test(cfg, dir);
  if (name == "far-translate") return run_far_translate(cfg, dir);
  if (name == "sweep") return run_sweep(cfg, dir);
  throw ConfigError("unknown subcommand " + name);
}

/// Creates the run directory, writes the resolved config beside the outputs,
/// dispatches, and writes the top-level manifest.  Returns the exit code per
/// the 0/1/2 contract; on failure `error_json` (if given) receives the
/// machine-readable error object.
inline int execute_run(const std::string& subcommand, const ExperimentConfig& cfg,
                       const std::filesystem::path& dir, json* error_json = nullptr,
                       json* report_out = nullptr) {
  auto fail = [&](const char* kind, const std::string& what, int code) {
    json err = {{"error", what}, {"kind", kind}, {"exit", code}};
    if (error_json) *error_json = err;
    std::error_code ec;
    if (std::filesystem::exists(dir, ec)) {
      std::ofstream os(dir / "error.json");
      os << err.dump(2) << "\n";
    }
    return code;
  };
  try {
    std::filesystem::create_directories(dir);
    detail::write_text(dir / "config.ini", serialize(cfg));
    json report = run_subcommand(subcommand, cfg, dir);
    json manifest = {{"subcommand", subcommand},
                     {"config", "config.ini"},
                     {"report", subcommand == "scatter-test" ? "scatter.json"
                                                             : subcommand + ".json"},
                     {"status", "ok"}};
    detail::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    if (report_out) *report_out = report;
    return 0;
  } catch (const ConfigError& ex) {
    return fail("config", ex.what(), 2);
  } catch (const std::exception& ex) {
    return fail("run", ex.what(), 1);
  }
}

}  // namespace inls
