#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "seaqt/seaqt.h"

namespace fs = std::filesystem;

namespace {

const char* kGoodScenario = R"({
  "id": "capi_ok",
  "system": {"subsystem_dims": [2], "H": [[0, 0], [0, 1]]},
  "dynamics": {"kind": "sea_single", "tau": [1.0]},
  "initial_state": {"kind": "explicit", "matrix": [[0.7, 0.1], [0.1, 0.3]]},
  "integration": {"t_final": 5.0, "samples": 11},
  "seed": 3
})";

const char* kFailingScenario = R"({
  "id": "capi_naive",
  "system": {"subsystem_dims": [3], "H": [[0, 0, 0], [0, 1, 0], [0, 0, 2]]},
  "dynamics": {"kind": "naive_relaxation", "tau": [1.0]},
  "initial_state": {
    "kind": "explicit",
    "matrix": [[0.4, 0.05, 0], [0.05, 0.3, 0.05], [0, 0.05, 0.3]]
  },
  "integration": {"t_final": 10.0, "samples": 21},
  "seed": 3
})";

fs::path write_file(const char* text, const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "seaqt_capi_tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("validate accepts good files and reports broken ones") {
  const fs::path good = write_file(kGoodScenario, "ok.json");
  CHECK(seaqt_scenario_validate(good.string().c_str()) == SEAQT_OK);

  const fs::path bad = write_file("{\"id\": 7}", "bad.json");
  CHECK(seaqt_scenario_validate(bad.string().c_str()) ==
        SEAQT_SCENARIO_ERROR);
  CHECK(std::strlen(seaqt_last_error()) > 0);

  CHECK(seaqt_scenario_validate(nullptr) == SEAQT_INVALID_ARGUMENT);
}

TEST_CASE("run returns a report handle with per-condition access") {
  const fs::path dir = fs::temp_directory_path() / "seaqt_capi_tests";
  const fs::path file = write_file(kGoodScenario, "ok.json");
  const fs::path rep = dir / "ok_report.json";
  const fs::path csv = dir / "ok_traj.csv";

  seaqt_report* report = nullptr;
  const seaqt_status st = seaqt_scenario_run(
      file.string().c_str(), rep.string().c_str(), csv.string().c_str(),
      &report);
  REQUIRE(st == SEAQT_OK);
  REQUIRE(report != nullptr);

  const int n = seaqt_report_condition_count(report);
  CHECK(n == 7);  // single system without extra invariants
  CHECK(seaqt_report_pass_count(report) == n);
  CHECK(seaqt_report_all_pass(report) == 1);
  int prev = 0;
  for (int k = 0; k < n; ++k) {
    const int id = seaqt_report_condition_id(report, k);
    CHECK(id > prev);
    prev = id;
    CHECK(seaqt_report_condition_status(report, k) == 0);
  }
  CHECK(seaqt_report_condition_id(report, -1) == -1);
  CHECK(seaqt_report_condition_id(report, n) == -1);

  char* json = seaqt_report_to_json(report);
  REQUIRE(json != nullptr);
  CHECK(std::string(json).find("\"capi_ok\"") != std::string::npos);
  seaqt_string_free(json);
  char* text = seaqt_report_to_text(report);
  REQUIRE(text != nullptr);
  CHECK(std::string(text).find("pass") != std::string::npos);
  seaqt_string_free(text);
  seaqt_report_free(report);

  CHECK(fs::exists(rep));
  CHECK(fs::exists(csv));
}

TEST_CASE("check failures surface as a status but still yield a report") {
  const fs::path dir = fs::temp_directory_path() / "seaqt_capi_tests";
  const fs::path file = write_file(kFailingScenario, "naive.json");
  seaqt_report* report = nullptr;
  const seaqt_status st = seaqt_scenario_run(
      file.string().c_str(), (dir / "n.json").string().c_str(),
      (dir / "n.csv").string().c_str(), &report);
  CHECK(st == SEAQT_CHECK_FAILED);
  REQUIRE(report != nullptr);
  CHECK(seaqt_report_all_pass(report) == 0);
  CHECK(seaqt_report_pass_count(report) <
        seaqt_report_condition_count(report));
  seaqt_report_free(report);
}

TEST_CASE("scenario errors set the thread-local error message") {
  seaqt_report* report = nullptr;
  const seaqt_status st =
      seaqt_scenario_run("/nonexistent/file.json", nullptr, nullptr, &report);
  CHECK(st == SEAQT_SCENARIO_ERROR);
  CHECK(report == nullptr);
  CHECK(std::strlen(seaqt_last_error()) > 0);
  CHECK(seaqt_scenario_run(nullptr, nullptr, nullptr, nullptr) ==
        SEAQT_INVALID_ARGUMENT);
}

TEST_CASE("suite run aggregates a directory deterministically") {
  const fs::path dir = fs::temp_directory_path() / "seaqt_capi_suite";
  const fs::path art = fs::temp_directory_path() / "seaqt_capi_artifacts";
  fs::remove_all(dir);
  fs::remove_all(art);
  fs::create_directories(dir);
  fs::create_directories(art);
  std::ofstream(dir / "a.json") << kGoodScenario;

  const fs::path prev = fs::current_path();
  fs::current_path(art);  // relative default artifact paths land here, not
                          // inside the scenario directory being scanned
  char* table1 = nullptr;
  char* table2 = nullptr;
  const seaqt_status s1 = seaqt_suite_run(
      dir.string().c_str(), 1, (art / "s1.json").string().c_str(), &table1);
  const seaqt_status s2 = seaqt_suite_run(
      dir.string().c_str(), 1, (art / "s2.json").string().c_str(), &table2);
  fs::current_path(prev);

  CHECK(s1 == SEAQT_OK);
  CHECK(s2 == SEAQT_OK);
  REQUIRE(table1 != nullptr);
  REQUIRE(table2 != nullptr);
  CHECK(std::string(table1) == std::string(table2));
  CHECK(std::string(table1).find("capi_ok") != std::string::npos);
  seaqt_string_free(table1);
  seaqt_string_free(table2);

  std::ifstream f1(art / "s1.json"), f2(art / "s2.json");
  std::string b1((std::istreambuf_iterator<char>(f1)), {});
  std::string b2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(b1 == b2);
  CHECK(!b1.empty());

  CHECK(seaqt_suite_run(nullptr, 1, nullptr, nullptr) ==
        SEAQT_INVALID_ARGUMENT);
}

TEST_CASE("report accessors reject null handles") {
  CHECK(seaqt_report_condition_count(nullptr) == -1);
  CHECK(seaqt_report_condition_id(nullptr, 0) == -1);
  CHECK(seaqt_report_condition_status(nullptr, 0) == -1);
  CHECK(seaqt_report_pass_count(nullptr) == -1);
  CHECK(seaqt_report_all_pass(nullptr) == 0);
  CHECK(seaqt_report_to_json(nullptr) == nullptr);
  CHECK(seaqt_report_to_text(nullptr) == nullptr);
  seaqt_report_free(nullptr);   // must be safe no-ops
  seaqt_string_free(nullptr);
}
