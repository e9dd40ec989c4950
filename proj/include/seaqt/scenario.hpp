#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "seaqt/compliance.hpp"

namespace seaqt {

// Fully resolved scenario: model, dynamics, initial state, and suite
// configuration, plus output paths (empty = derive from the scenario id).
struct Scenario {
  std::string id;
  SystemModel model;
  DynamicsSpec dynamics;
  QuantumState initial;
  SuiteConfig suite;
  std::string report_path;
  std::string trajectory_path;
};

// Parses and validates a scenario document. Schema errors throw
// Error(SchemaViolation) whose message names the offending field path.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);

// Deterministic serialization (sorted keys) of a compliance report.
nlohmann::json report_to_json(const ComplianceReport& report);

// Human-readable table keyed by condition number.
std::string report_to_text(const ComplianceReport& report);

// Tolerance-profile multiplier from the SEAQT_TOL_SCALE environment
// variable; 1.0 when unset.
double tolerance_scale_from_env();

// Outcome of one scenario execution. exit_code: 0 (all non-info checks
// pass), 2 (check failure), 3 (scenario error, with the message in error).
struct ScenarioOutcome {
  std::string id;
  int exit_code = 3;
  std::optional<ComplianceReport> report;
  std::string error;
  std::string text;  // report_to_text of the report, when available
};

// Loads, runs, and writes the report JSON and trajectory CSV for one scenario
// file. Non-empty overrides replace the scenario's output paths. Never
// throws; failures are carried in the outcome.
ScenarioOutcome execute_scenario(const std::string& path,
                                 const std::string& report_override = {},
                                 const std::string& csv_override = {});

// Convenience wrapper around execute_scenario printing the text table (or the
// error) to log and returning the exit code.
int run_scenario(const std::string& path, std::ostream& log,
                 const std::string& report_override = {},
                 const std::string& csv_override = {});

// Runs every *.json scenario in dir in id order; per-scenario errors are
// recorded without aborting the rest. Writes aggregate JSON to summary_path
// (default "suite_summary.json") and a text table to log. Returns 0 when all
// scenarios pass, 2 when any check fails, 3 when any scenario errors; an
// empty directory warns and returns 0.
int run_suite(const std::string& dir, std::ostream& log, int jobs = 1,
              const std::string& summary_path = {});

// Parses and validates without running. Returns 0 or 3.
int validate_scenario(const std::string& path, std::ostream& log);

}  // namespace seaqt
