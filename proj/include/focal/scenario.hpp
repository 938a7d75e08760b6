#pragma once

#include "focal/comparison.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace focal {

using json = nlohmann::ordered_json;

struct CliOverrides {
  std::optional<std::string> out_dir;
  std::optional<double> step;
  std::optional<double> tol;
  std::optional<std::string> csv_path;
};

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::optional<double> expected;
  std::optional<double> tolerance;
  std::string source;  // where the expected value comes from
};

struct RunResult {
  int exit_code = 0;  // 0: all checks pass, 2: a check failed
  json report;
  std::vector<Check> checks;
  std::string summary;
};

// Parse, validate and execute a scenario configuration.  `expected_kind`, when
// nonempty, must match analysis.kind.  Throws ConfigError for invalid
// configurations (CLI exit code 1).
RunResult run_scenario_file(const std::string& path, const CliOverrides& ov = {},
                            const std::string& expected_kind = {});
RunResult run_scenario(const json& config, const CliOverrides& ov = {},
                       const std::string& expected_kind = {},
                       const std::string& config_name = "<config>");

struct ExampleInfo {
  std::string id;
  std::string description;
};

// Canned scenarios reproducing the worked examples, keyed by id.
const std::vector<ExampleInfo>& example_registry();
RunResult reproduce(const std::string& id, const CliOverrides& ov = {});

// Model construction from the scenario schema (used directly by tests).
GeodesicModel model_from_config(const json& m);
SubmanifoldData submanifold_from_config(const json& s, const GeodesicModel& model);

}  // namespace focal
