#include "seaqt/seaqt.h"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "seaqt/scenario.hpp"

struct seaqt_report {
  seaqt::ComplianceReport report;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

seaqt_status status_from_exit(int code) {
  switch (code) {
    case 0: return SEAQT_OK;
    case 2: return SEAQT_CHECK_FAILED;
    default: return SEAQT_SCENARIO_ERROR;
  }
}

}  // namespace

extern "C" {

seaqt_status seaqt_scenario_validate(const char* path) {
  g_last_error.clear();
  if (!path) {
    g_last_error = "path is NULL";
    return SEAQT_INVALID_ARGUMENT;
  }
  try {
    std::ostringstream log;
    if (seaqt::validate_scenario(path, log) == 0) return SEAQT_OK;
    std::string msg = log.str();
    // The log line is already prefixed and newline-terminated for terminal
    // use; the API surfaces the bare message.
    if (msg.rfind("error: ", 0) == 0) msg.erase(0, 7);
    while (!msg.empty() && msg.back() == '\n') msg.pop_back();
    g_last_error = std::move(msg);
    return SEAQT_SCENARIO_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SEAQT_INTERNAL_ERROR;
  }
}

seaqt_status seaqt_scenario_run(const char* path, const char* report_path,
                                const char* csv_path,
                                seaqt_report** out_report) {
  g_last_error.clear();
  if (out_report) *out_report = nullptr;
  if (!path) {
    g_last_error = "path is NULL";
    return SEAQT_INVALID_ARGUMENT;
  }
  try {
    seaqt::ScenarioOutcome out = seaqt::execute_scenario(
        path, report_path ? report_path : "", csv_path ? csv_path : "");
    if (!out.error.empty()) {
      g_last_error = out.error;
      return SEAQT_SCENARIO_ERROR;
    }
    if (out_report && out.report) {
      *out_report = new seaqt_report{std::move(*out.report)};
    }
    return status_from_exit(out.exit_code);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SEAQT_INTERNAL_ERROR;
  }
}

seaqt_status seaqt_suite_run(const char* dir, int jobs,
                             const char* summary_path, char** out_table) {
  g_last_error.clear();
  if (out_table) *out_table = nullptr;
  if (!dir) {
    g_last_error = "dir is NULL";
    return SEAQT_INVALID_ARGUMENT;
  }
  try {
    std::ostringstream log;
    const int code = seaqt::run_suite(dir, log, jobs,
                                      summary_path ? summary_path : "");
    if (out_table) *out_table = dup_string(log.str());
    if (code == 3) g_last_error = log.str();
    return status_from_exit(code);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SEAQT_INTERNAL_ERROR;
  }
}

int seaqt_report_condition_count(const seaqt_report* report) {
  if (!report) return -1;
  return static_cast<int>(report->report.results.size());
}

int seaqt_report_condition_id(const seaqt_report* report, int index) {
  if (!report || index < 0 ||
      index >= static_cast<int>(report->report.results.size())) {
    return -1;
  }
  return report->report.results[index].condition_id;
}

int seaqt_report_condition_status(const seaqt_report* report, int index) {
  if (!report || index < 0 ||
      index >= static_cast<int>(report->report.results.size())) {
    return -1;
  }
  return static_cast<int>(report->report.results[index].status);
}

int seaqt_report_pass_count(const seaqt_report* report) {
  if (!report) return -1;
  return report->report.pass_count();
}

int seaqt_report_all_pass(const seaqt_report* report) {
  if (!report) return 0;
  return report->report.all_binding_pass() ? 1 : 0;
}

char* seaqt_report_to_json(const seaqt_report* report) {
  if (!report) return nullptr;
  try {
    return dup_string(seaqt::report_to_json(report->report).dump(2) + "\n");
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return nullptr;
  }
}

char* seaqt_report_to_text(const seaqt_report* report) {
  if (!report) return nullptr;
  try {
    return dup_string(seaqt::report_to_text(report->report));
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return nullptr;
  }
}

void seaqt_report_free(seaqt_report* report) { delete report; }

void seaqt_string_free(char* s) { std::free(s); }

const char* seaqt_last_error(void) { return g_last_error.c_str(); }

}  // extern "C"
