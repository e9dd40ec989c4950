// Command-line front end; talks to the engine exclusively through the C API.
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "seaqt/seaqt.h"

namespace {

int exit_code_for(seaqt_status status) {
  switch (status) {
    case SEAQT_OK: return 0;
    case SEAQT_CHECK_FAILED: return 2;
    default: return 3;
  }
}

void print_last_error() {
  const char* msg = seaqt_last_error();
  if (msg && *msg) std::fprintf(stderr, "error: %s\n", msg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum-state dynamics engine and thermodynamic-compatibility "
               "verification suite"};
  app.require_subcommand(1);

  std::string run_file, run_out, run_csv;
  CLI::App* run = app.add_subcommand("run", "run one scenario file");
  run->add_option("file", run_file, "scenario JSON file")->required();
  run->add_option("--out", run_out, "report JSON path override");
  run->add_option("--csv", run_csv, "trajectory CSV path override");

  std::string suite_dir, suite_summary;
  int suite_jobs = 1;
  CLI::App* suite = app.add_subcommand("suite", "run a directory of scenarios");
  suite->add_option("dir", suite_dir, "directory of scenario files")->required();
  suite->add_option("--jobs", suite_jobs, "parallelism hint");
  suite->add_option("--summary", suite_summary, "aggregate JSON path");

  std::string validate_file;
  CLI::App* validate =
      app.add_subcommand("validate", "parse and validate a scenario file");
  validate->add_option("file", validate_file, "scenario JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    seaqt_report* report = nullptr;
    const seaqt_status status = seaqt_scenario_run(
        run_file.c_str(), run_out.empty() ? nullptr : run_out.c_str(),
        run_csv.empty() ? nullptr : run_csv.c_str(), &report);
    if (report) {
      char* text = seaqt_report_to_text(report);
      if (text) {
        std::fputs(text, stdout);
        seaqt_string_free(text);
      }
      seaqt_report_free(report);
    }
    print_last_error();
    return exit_code_for(status);
  }

  if (suite->parsed()) {
    char* table = nullptr;
    const seaqt_status status = seaqt_suite_run(
        suite_dir.c_str(), suite_jobs,
        suite_summary.empty() ? nullptr : suite_summary.c_str(), &table);
    if (table) {
      std::fputs(table, stdout);
      seaqt_string_free(table);
    }
    if (status != SEAQT_OK && status != SEAQT_CHECK_FAILED) print_last_error();
    return exit_code_for(status);
  }

  const seaqt_status status = seaqt_scenario_validate(validate_file.c_str());
  if (status == SEAQT_OK) {
    std::printf("ok: %s\n", validate_file.c_str());
  } else {
    print_last_error();
  }
  return exit_code_for(status);
}
