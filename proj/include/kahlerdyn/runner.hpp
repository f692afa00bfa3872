// Config-driven experiments: validation, dispatch to the modules, reports,
// content-addressed persistence and suites.
#pragma once

#include <string>
#include <vector>

#include "kahlerdyn/serialize.hpp"

namespace kahlerdyn {

inline constexpr int kSchemaVersion = 1;
inline constexpr int kReportVersion = 1;
inline constexpr const char* kOutputRootEnv = "KAHLERDYN_OUTPUT_ROOT";

const std::vector<std::string>& experiment_kinds();

struct Verdict {
  std::string name;
  bool passed = false;
  std::string anchor;
  std::string detail;
};

struct ExperimentReport {
  std::string kind;
  std::string name;
  Json config;
  Json results = Json::object();
  Json sequences = Json::object();  // name -> [[x, y], ...]
  std::vector<Verdict> verdicts;
  Json dropped_mass = Json::object();
  double timing_seconds = 0.0;

  bool passed() const;
  /// Timing is kept out unless asked for, so equal inputs give equal bytes.
  Json to_json(bool with_timing = false) const;
};

Json load_json_file(const std::string& path);

/// Checks a raw config against the schema, fills defaults and inlines
/// model_path. Throws UsageError("<field path>: <message>").
Json validate_config(const Json& raw, const std::string& base_dir = ".");

/// Runs a validated config.
ExperimentReport run_experiment(const Json& config);

/// Root for run directories: config output_dir, else $KAHLERDYN_OUTPUT_ROOT, else "runs".
std::string output_root(const Json& config);
/// <root>/<name>-<hash of the config without output_dir>.
std::string run_directory(const Json& config);

/// Writes config.json, report.json, timing.json, one CSV per sequence and
/// plot_data.csv. Returns the run directory.
std::string persist_report(const ExperimentReport& report);

struct SuiteEntry {
  std::string config_path;
  std::string name;
  std::string kind;
  std::string run_dir;
  int verdicts_passed = 0;
  int verdicts_total = 0;
  bool passed = false;
  std::string error;
};

struct SuiteSummary {
  std::vector<SuiteEntry> entries;
  bool passed() const;
  Json to_json() const;
  std::string table() const;
};

/// Manifest: {"configs": [paths relative to the manifest]}. Throws UsageError
/// naming a missing config file. Results are in manifest order.
SuiteSummary run_suite(const std::string& manifest_path, bool persist = true, int workers = 1);

/// Human-readable summary of a persisted run directory.
std::string show_run(const std::string& run_dir);

}  // namespace kahlerdyn
