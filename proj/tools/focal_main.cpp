// Command-line front end: scenario execution, worked-example reproduction,
// and plot-ready CSV emission.
//
// Exit codes: 0 all checks pass, 1 configuration or runtime error, 2 a check
// failed.

#include "focal/scenario.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <unistd.h>

namespace {

bool use_color() {
  if (std::getenv("NO_COLOR") != nullptr) return false;
  return isatty(fileno(stdout)) != 0;
}

void print_summary(const focal::RunResult& res) {
  if (!use_color()) {
    std::cout << res.summary;
    return;
  }
  std::istringstream in(res.summary);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("PASS", 0) == 0)
      std::cout << "\033[32mPASS\033[0m" << line.substr(4) << '\n';
    else if (line.rfind("FAIL", 0) == 0)
      std::cout << "\033[31mFAIL\033[0m" << line.substr(4) << '\n';
    else
      std::cout << line << '\n';
  }
}

int finish(const focal::RunResult& res) {
  print_summary(res);
  if (res.checks.empty()) std::cout << "no checks configured; analysis report only\n";
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"comparison geometry along geodesics: Jacobi families, Riccati "
               "comparison, transverse splits, focal radii"};
  app.require_subcommand(1);

  std::string config_path;
  focal::CliOverrides ov;
  double step = 0.0, tol = 0.0;
  std::string out_dir, csv_path;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config)
      cmd->add_option("--config", config_path, "scenario configuration file")->required();
    cmd->add_option("--out", out_dir, "directory for report/CSV outputs");
    cmd->add_option("--step", step, "integration step override");
    cmd->add_option("--tol", tol, "tolerance override for the main check");
    cmd->add_option("--csv", csv_path, "write the time series to this CSV file");
  };

  auto* focal_radius = app.add_subcommand("focal-radius", "first focal times over directions");
  add_common(focal_radius, true);
  auto* compare = app.add_subcommand("compare", "trace comparison along the horizontal bundle");
  add_common(compare, true);
  auto* transverse =
      app.add_subcommand("transverse-check", "transverse equation residual and trace transfer");
  add_common(transverse, true);
  auto* repro = app.add_subcommand("reproduce", "run a canned worked example");
  std::string example_id;
  repro->add_option("id", example_id, "example identifier")->required();
  add_common(repro, false);
  auto* list = app.add_subcommand("list-examples", "list known example identifiers");

  CLI11_PARSE(app, argc, argv);

  if (step > 0.0) ov.step = step;
  if (tol > 0.0) ov.tol = tol;
  if (!out_dir.empty()) ov.out_dir = out_dir;
  if (!csv_path.empty()) ov.csv_path = csv_path;

  try {
    if (list->parsed()) {
      for (const auto& e : focal::example_registry())
        std::cout << e.id << "  " << e.description << '\n';
      return 0;
    }
    if (repro->parsed()) return finish(focal::reproduce(example_id, ov));
    if (focal_radius->parsed())
      return finish(focal::run_scenario_file(config_path, ov, "focal_radius"));
    if (compare->parsed()) return finish(focal::run_scenario_file(config_path, ov, "compare"));
    if (transverse->parsed())
      return finish(focal::run_scenario_file(config_path, ov, "transverse_check"));
  } catch (const focal::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
