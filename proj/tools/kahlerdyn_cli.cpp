// kahlerdyn: run / suite / validate / show.
// Exit codes: 0 success, 1 verdict failure or module error, 2 usage error.

#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "kahlerdyn/error.hpp"
#include "kahlerdyn/runner.hpp"

namespace fs = std::filesystem;
using namespace kahlerdyn;

namespace {

Json load_config(const std::string& path) {
  return validate_config(load_json_file(path), fs::path(path).parent_path().string());
}

int cmd_run(const std::string& path, bool persist, bool print) {
  Json cfg = load_config(path);
  ExperimentReport rep = run_experiment(cfg);
  if (persist) std::cout << "run dir: " << persist_report(rep) << "\n";
  if (print) std::cout << rep.to_json(true).dump(2) << "\n";
  for (const auto& v : rep.verdicts)
    std::cout << (v.passed ? "PASS " : "FAIL ") << v.name << ": " << v.detail << "\n";
  std::cout << rep.verdicts.size() << " verdicts, " << (rep.passed() ? "all passed" : "failures present") << "\n";
  return rep.passed() ? 0 : 1;
}

int cmd_suite(const std::string& manifest, int workers, bool persist) {
  SuiteSummary s = run_suite(manifest, persist, workers);
  std::cout << s.table();
  return s.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kahlerdyn: dynamics of torus automorphisms, Green currents and entropy"};
  app.require_subcommand(1);

  std::string config_path, manifest_path, run_dir;
  bool no_persist = false, print = false;
  int workers = 1;

  auto* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("config", config_path, "Config JSON")->required();
  run->add_flag("--no-persist", no_persist, "Do not write the run directory");
  run->add_flag("--print", print, "Print the full report JSON");

  auto* suite = app.add_subcommand("suite", "Run every config listed in a manifest");
  suite->add_option("manifest", manifest_path, "Manifest JSON")->required();
  suite->add_option("-j,--workers", workers, "Configs run concurrently")->check(CLI::Range(1, 256));
  suite->add_flag("--no-persist", no_persist, "Do not write run directories");

  auto* validate = app.add_subcommand("validate", "Check a config against the schema");
  validate->add_option("config", config_path, "Config JSON")->required();

  auto* show = app.add_subcommand("show", "Summarize a persisted run directory");
  show->add_option("run_dir", run_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, !no_persist, print);
    if (suite->parsed()) return cmd_suite(manifest_path, workers, !no_persist);
    if (validate->parsed()) {
      Json cfg = load_config(config_path);
      std::cout << "valid: " << cfg["kind"].get<std::string>() << " '" << cfg["name"].get<std::string>() << "'\n";
      return 0;
    }
    if (show->parsed()) {
      std::cout << show_run(run_dir);
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
