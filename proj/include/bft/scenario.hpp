#ifndef BFT_SCENARIO_HPP
#define BFT_SCENARIO_HPP

#include "bft/analysis.hpp"
#include "bft/simulation.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bft {

struct OutputOptions {
  int decimation = 10;
  std::vector<std::string> formats{"csv", "json", "svg"};
};

/// Everything needed to reproduce one run. Agent ids are 1-based in the file
/// format and 0-based here; parse/serialize convert at the boundary.
struct ScenarioConfig {
  std::string name;
  std::string description;
  FormationSpec formation;
  bool renormalize_bearings = false;
  Law law = Law::kDirect;
  GainSet gains;
  std::vector<std::string> reconstructed_gains;  // gains not taken from the source scenario
  VelocityProfile profile;
  IntegratorConfig integrator;
  InitialCondition initial;
  ControllerOptions controller;
  bool override_rigidity = false;
  OutputOptions output;
  ReportPolicy policy;
};

/// Parses the JSON scenario format. Syntax errors report line and column;
/// field errors are collected and reported together. Throws Error(kParse).
ScenarioConfig parse_scenario(std::string_view text);

/// Cross-validation: graph rules, gain inequalities, disturbance bounds,
/// integrator settings and the localizability (B_ff > 0) check. Returns
/// every violation.
std::vector<std::string> validate_scenario(const ScenarioConfig& config);

/// Non-fatal findings, e.g. a formation that is localizable but not
/// infinitesimally bearing rigid.
std::vector<std::string> scenario_warnings(const ScenarioConfig& config);

/// parse_scenario + validate_scenario. Throws Error(kIo), Error(kParse) or
/// Error(kValidation) listing all violations.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig load_scenario_text(std::string_view text);

std::string serialize_scenario(const ScenarioConfig& config);

/// Field-level comparison (exact for numbers).
bool equivalent(const ScenarioConfig& a, const ScenarioConfig& b);

/// Bundled scenarios: "sim1" (law A) and "sim2" (law B).
std::optional<std::string> builtin_scenario(std::string_view name);
std::vector<std::string> builtin_scenario_names();

SimulationSetup make_setup(const ScenarioConfig& config);

struct RunResult {
  Trace trace;
  ConvergenceReport report;
  std::vector<std::string> warnings;
};

/// Validates and simulates. Throws Error(kValidation) for invalid configs.
RunResult run_scenario(const ScenarioConfig& config);

/// Formation-model analysis as JSON: Laplacian blocks, bearing Laplacian
/// rank and rigidity, B_ff definiteness, desired realization, estimator eigenvalues.
std::string rigidity_report_json(const ScenarioConfig& config);

}  // namespace bft

#endif  // BFT_SCENARIO_HPP
