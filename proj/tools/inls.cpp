// inls <subcommand> --config <path> [overrides section.key=value ...]
//
// Subcommands: certify | groundstate | evolve | classify | virial |
// scatter-test | far-translate | sweep.  Outputs go to a timestamped run
// directory under, in order of precedence, --out (used verbatim), the
// INLS_OUTPUT_ROOT environment variable, run.output_dir from the config, or
// ./runs.  Exit codes: 0 success, 1 run failure, 2 config error; failures
// also emit a machine-readable error JSON on stdout.

#include <CLI11.hpp>

#include <cstdlib>
#include <ctime>
#include <iostream>

#include "inls/cli.hpp"

namespace {

std::filesystem::path pick_run_dir(const std::string& out_flag, const inls::ExperimentConfig& cfg,
                                   const std::string& subcommand) {
  if (!out_flag.empty()) return out_flag;
  std::string root;
  if (const char* env = std::getenv("INLS_OUTPUT_ROOT"))
    root = env;
  else
    root = cfg.str("run", "output_dir", "runs");
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  localtime_r(&now, &tm);
  char stamp[64];
  std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
  // A counter suffix keeps directories unique within one second.
  for (int k = 0;; ++k) {
    std::string name = subcommand + "-" + stamp + (k ? "-" + std::to_string(k) : "");
    std::filesystem::path dir = std::filesystem::path(root) / name;
    if (!std::filesystem::exists(dir)) return dir;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"INLS experiment runner"};
  app.require_subcommand(1);

  const std::vector<std::string> names = {"certify",  "groundstate", "evolve",
                                          "classify", "virial",      "scatter-test",
                                          "far-translate", "sweep"};
  struct Args {
    std::string config;
    std::string out;
    std::vector<std::string> overrides;
  };
  std::map<std::string, Args> args;
  for (const auto& n : names) {
    auto* sub = app.add_subcommand(n);
    auto& a = args[n];
    sub->add_option("--config", a.config, "config file (sectioned key = value text)");
    sub->add_option("--out", a.out, "exact output directory (bypasses the timestamped layout)");
    sub->add_option("overrides", a.overrides, "section.key=value overrides");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  const Args& a = args[name];

  inls::json err;
  try {
    inls::ExperimentConfig cfg =
        a.config.empty() ? inls::ExperimentConfig{} : inls::load_config(a.config);
    for (const auto& o : a.overrides) cfg.apply_override(o);
    std::filesystem::path dir = pick_run_dir(a.out, cfg, name);
    inls::json report;
    int code = inls::execute_run(name, cfg, dir, &err, &report);
    if (code == 0) {
      inls::json ok = {{"run_dir", dir.string()}, {"status", "ok"}};
      // Surface headline results for the common interactive cases.
      for (const char* key : {"all_pass", "residual", "mass_drift", "status"})
        if (report.contains(key)) ok[key] = report[key];
      std::cout << ok.dump(2) << "\n";
    } else {
      std::cout << err.dump(2) << "\n";
    }
    return code;
  } catch (const inls::ConfigError& ex) {
    err = {{"error", ex.what()}, {"kind", "config"}, {"exit", 2}};
    std::cout << err.dump(2) << "\n";
    return 2;
  } catch (const std::exception& ex) {
    err = {{"error", ex.what()}, {"kind", "run"}, {"exit", 1}};
    std::cout << err.dump(2) << "\n";
    return 1;
  }
}
