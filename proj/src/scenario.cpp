#include "seaqt/scenario.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

namespace seaqt {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& path,
                               const std::string& reason) {
  throw Error(ErrorCode::SchemaViolation, path + ": " + reason);
}

const json& require(const json& obj, const std::string& key,
                    const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "." + key, "missing field");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected an integer");
  return j.get<int>();
}

Complex parse_complex(const json& j, const std::string& path) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return Complex(j[0].get<double>(), j[1].get<double>());
  }
  schema_error(path, "expected a number or an [re, im] pair");
}

Matrix parse_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) {
    schema_error(path, "expected a non-empty array of rows");
  }
  const int rows = static_cast<int>(j.size());
  const int cols = j[0].is_array() ? static_cast<int>(j[0].size()) : -1;
  if (cols <= 0) schema_error(path + "[0]", "expected an array of entries");
  if (rows != cols) {
    schema_error(path, "expected a square matrix, got " +
                           std::to_string(rows) + "x" + std::to_string(cols));
  }
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols) {
      schema_error(row_path, "row length differs from matrix width");
    }
    for (int c = 0; c < cols; ++c) {
      m(r, c) =
          parse_complex(j[r][c], row_path + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

Eigen::VectorXcd parse_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) {
    schema_error(path, "expected a non-empty array");
  }
  Eigen::VectorXcd v(j.size());
  for (size_t k = 0; k < j.size(); ++k) {
    v[k] = parse_complex(j[k], path + "[" + std::to_string(k) + "]");
  }
  return v;
}

std::vector<double> parse_number_list(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array of numbers");
  std::vector<double> out;
  for (size_t k = 0; k < j.size(); ++k) {
    out.push_back(as_number(j[k], path + "[" + std::to_string(k) + "]"));
  }
  return out;
}

SystemModel parse_model(const json& j) {
  SystemModel model;
  Matrix h = parse_matrix(require(j, "H", "system"), "system.H");
  const int dim = static_cast<int>(h.rows());
  try {
    model.H = Observable(std::move(h));
  } catch (const Error& e) {
    schema_error("system.H", e.what());
  }

  if (j.contains("subsystem_dims")) {
    const json& sd = j["subsystem_dims"];
    if (!sd.is_array() || sd.empty()) {
      schema_error("system.subsystem_dims", "expected a non-empty array");
    }
    int prod = 1;
    for (size_t k = 0; k < sd.size(); ++k) {
      const int d =
          as_int(sd[k], "system.subsystem_dims[" + std::to_string(k) + "]");
      if (d < 1) schema_error("system.subsystem_dims", "dims must be >= 1");
      model.subsystem_dims.push_back(d);
      prod *= d;
    }
    if (prod != dim) {
      schema_error("system.subsystem_dims",
                   "product " + std::to_string(prod) +
                       " does not match dim(H) = " + std::to_string(dim));
    }
  } else {
    model.subsystem_dims = {dim};
  }

  if (j.contains("G")) {
    const json& gs = j["G"];
    if (!gs.is_array()) schema_error("system.G", "expected an array");
    for (size_t k = 0; k < gs.size(); ++k) {
      const std::string path = "system.G[" + std::to_string(k) + "]";
      Matrix g = parse_matrix(gs[k], path);
      if (g.rows() != dim) schema_error(path, "dimension mismatch with H");
      try {
        model.invariants.emplace_back(std::move(g));
      } catch (const Error& e) {
        schema_error(path, e.what());
      }
    }
  }

  if (j.contains("H_parts")) {
    const json& hp = j["H_parts"];
    if (!hp.is_array() || hp.size() != 2) {
      schema_error("system.H_parts", "expected exactly two local matrices");
    }
    if (model.subsystem_dims.size() != 2) {
      schema_error("system.H_parts",
                   "requires bipartite system.subsystem_dims");
    }
    std::vector<Observable> parts;
    for (int k = 0; k < 2; ++k) {
      const std::string path = "system.H_parts[" + std::to_string(k) + "]";
      Matrix p = parse_matrix(hp[k], path);
      if (p.rows() != model.subsystem_dims[k]) {
        schema_error(path, "dimension mismatch with subsystem_dims");
      }
      try {
        parts.emplace_back(std::move(p));
      } catch (const Error& e) {
        schema_error(path, e.what());
      }
    }
    model.H_parts = std::move(parts);
  }

  if (j.contains("constants")) {
    const json& c = j["constants"];
    if (c.contains("k_B")) model.constants.k_B = as_number(c["k_B"], "system.constants.k_B");
    if (c.contains("hbar")) model.constants.hbar = as_number(c["hbar"], "system.constants.hbar");
    if (model.constants.k_B <= 0 || model.constants.hbar <= 0) {
      schema_error("system.constants", "k_B and hbar must be positive");
    }
  }

  try {
    model.validate();
  } catch (const Error& e) {
    schema_error("system", e.what());
  }
  return model;
}

std::uint64_t require_seed(const json& j, const std::string& path) {
  if (!j.contains("seed")) {
    schema_error(path + ".seed", "seed is mandatory for random constructors");
  }
  if (!j["seed"].is_number_integer()) {
    schema_error(path + ".seed", "expected an integer");
  }
  return j["seed"].get<std::uint64_t>();
}

QuantumState parse_initial_state(const json& j, const SystemModel& model) {
  const std::string path = "initial_state";
  const int dim = model.dim();
  std::string kind = "explicit";
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) schema_error(path + ".kind", "expected a string");
    kind = j["kind"].get<std::string>();
  } else if (!j.contains("matrix")) {
    schema_error(path, "expected either kind or matrix");
  }

  auto check_dim = [&](const Matrix& m, const std::string& p) {
    if (m.rows() != dim) {
      schema_error(p, "dimension " + std::to_string(m.rows()) +
                          " does not match the model dimension " +
                          std::to_string(dim));
    }
  };

  if (kind == "explicit") {
    Matrix m = parse_matrix(require(j, "matrix", path), path + ".matrix");
    check_dim(m, path + ".matrix");
    try {
      return validate_state(m, {}, "initial_state");
    } catch (const Error& e) {
      schema_error(path + ".matrix", e.what());
    }
  }
  if (kind == "pure") {
    Eigen::VectorXcd v =
        parse_vector(require(j, "vector", path), path + ".vector");
    if (v.size() != dim) schema_error(path + ".vector", "dimension mismatch");
    const double norm = v.norm();
    if (norm < 1e-12) schema_error(path + ".vector", "zero vector");
    v /= norm;
    Matrix m = v * v.adjoint();
    symmetrize(m);
    return QuantumState::unchecked(std::move(m), "pure");
  }
  if (kind == "gibbs") {
    if (j.contains("beta")) {
      std::vector<double> nu;
      if (j.contains("nu")) nu = parse_number_list(j["nu"], path + ".nu");
      return gibbs_density(model, as_number(j["beta"], path + ".beta"), nu);
    }
    std::vector<double> g;
    if (j.contains("g")) g = parse_number_list(j["g"], path + ".g");
    if (g.size() != model.invariants.size()) {
      schema_error(path + ".g", "expected one target per G invariant");
    }
    return solve_gibbs(model, as_number(require(j, "e", path), path + ".e"), g)
        .state;
  }
  if (kind == "nd") {
    const json& support = require(j, "support", path);
    if (!support.is_array() || support.empty()) {
      schema_error(path + ".support", "expected a non-empty index array");
    }
    std::vector<Matrix> ops;
    ops.push_back(model.H.matrix);
    for (const Observable& g : model.invariants) ops.push_back(g.matrix);
    const Matrix phi = simultaneous_eigenbasis(ops);
    Matrix b = Matrix::Zero(dim, dim);
    for (size_t k = 0; k < support.size(); ++k) {
      const int idx =
          as_int(support[k], path + ".support[" + std::to_string(k) + "]");
      if (idx < 0 || idx >= dim) {
        schema_error(path + ".support", "index out of range");
      }
      b += phi.col(idx) * phi.col(idx).adjoint();
    }
    symmetrize(b);
    std::vector<double> g;
    if (j.contains("g")) g = parse_number_list(j["g"], path + ".g");
    return nd_state(model, Observable(std::move(b)),
                    as_number(require(j, "e", path), path + ".e"), g);
  }
  if (kind == "product") {
    const json& factors = require(j, "factors", path);
    if (!factors.is_array() || factors.size() != model.subsystem_dims.size()) {
      schema_error(path + ".factors",
                   "expected one factor per declared subsystem");
    }
    Matrix m = Matrix::Identity(1, 1);
    for (size_t k = 0; k < factors.size(); ++k) {
      const std::string p = path + ".factors[" + std::to_string(k) + "]";
      Matrix f = parse_matrix(factors[k], p);
      if (f.rows() != model.subsystem_dims[k]) {
        schema_error(p, "dimension mismatch with subsystem_dims");
      }
      try {
        validate_state(f, {}, "factor");
      } catch (const Error& e) {
        schema_error(p, e.what());
      }
      m = kron(m, f);
    }
    symmetrize(m);
    return QuantumState::unchecked(std::move(m), "product");
  }
  if (kind == "random_full_rank" || kind == "random_ranked") {
    std::mt19937_64 rng(require_seed(j, path));
    int rank = dim;
    if (kind == "random_ranked") {
      rank = as_int(require(j, "rank", path), path + ".rank");
      if (rank < 1 || rank > dim) {
        schema_error(path + ".rank", "rank must be in [1, dim]");
      }
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix a(dim, rank);
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < rank; ++c) a(r, c) = Complex(gauss(rng), gauss(rng));
    }
    Matrix m = a * a.adjoint();
    m /= m.trace().real();
    symmetrize(m);
    return QuantumState::unchecked(std::move(m), kind);
  }
  schema_error(path + ".kind", "unknown initial-state kind: " + kind);
}

void parse_checks(const json& j, Scenario& sc) {
  if (!j.is_array()) schema_error("checks", "expected an array");
  const std::vector<int> applicable = applicable_conditions(sc.model);
  for (size_t k = 0; k < j.size(); ++k) {
    const std::string path = "checks[" + std::to_string(k) + "]";
    int id = 0;
    if (j[k].is_number_integer()) {
      id = j[k].get<int>();
    } else if (j[k].is_object()) {
      id = as_int(require(j[k], "condition", path), path + ".condition");
      if (j[k].contains("tol")) {
        sc.suite.tol_overrides[id] = as_number(j[k]["tol"], path + ".tol");
      }
    } else {
      schema_error(path, "expected an id or {condition, tol}");
    }
    if (id < 1 || id > 10) schema_error(path, "condition ids are 1..10");
    if (std::find(applicable.begin(), applicable.end(), id) ==
        applicable.end()) {
      schema_error(path, "condition " + std::to_string(id) +
                             " needs a noninteracting bipartite model");
    }
    sc.suite.conditions.push_back(id);
  }
  std::sort(sc.suite.conditions.begin(), sc.suite.conditions.end());
  sc.suite.conditions.erase(
      std::unique(sc.suite.conditions.begin(), sc.suite.conditions.end()),
      sc.suite.conditions.end());
}

void parse_integration(const json& j, SuiteConfig& suite) {
  IntegratorConfig& ic = suite.integration;
  if (j.contains("rtol")) ic.rtol = as_number(j["rtol"], "integration.rtol");
  if (j.contains("atol")) ic.atol = as_number(j["atol"], "integration.atol");
  if (j.contains("dt_init")) ic.dt_init = as_number(j["dt_init"], "integration.dt_init");
  if (j.contains("dt_max")) ic.dt_max = as_number(j["dt_max"], "integration.dt_max");
  if (j.contains("eps_ker")) {
    ic.eps_ker = as_number(j["eps_ker"], "integration.eps_ker");
    suite.eps_ker = ic.eps_ker;
  }
  if (j.contains("mode")) {
    const std::string mode = j["mode"].is_string()
                                 ? j["mode"].get<std::string>()
                                 : std::string();
    if (mode == "raw") {
      ic.mode = RepairMode::raw;
    } else if (mode == "strict") {
      ic.mode = RepairMode::strict;
    } else {
      schema_error("integration.mode", "expected \"raw\" or \"strict\"");
    }
  }
  if (j.contains("t_final")) {
    suite.t_final = as_number(j["t_final"], "integration.t_final");
    if (suite.t_final <= 0) schema_error("integration.t_final", "must be > 0");
  }
  if (j.contains("samples")) {
    suite.samples = as_int(j["samples"], "integration.samples");
    if (suite.samples < 2) schema_error("integration.samples", "need >= 2");
  }
  if (j.contains("backward_horizon")) {
    suite.backward_horizon =
        as_number(j["backward_horizon"], "integration.backward_horizon");
    if (suite.backward_horizon < 0) {
      schema_error("integration.backward_horizon", "must be >= 0");
    }
  }
  if (j.contains("backward_samples")) {
    suite.backward_samples =
        as_int(j["backward_samples"], "integration.backward_samples");
    if (suite.backward_samples < 2) {
      schema_error("integration.backward_samples", "need >= 2");
    }
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) schema_error("$", "scenario document must be an object");
  Scenario sc;
  const json& id = require(doc, "id", "$");
  if (!id.is_string()) schema_error("id", "expected a string");
  sc.id = id.get<std::string>();
  if (sc.id.empty()) schema_error("id", "must be non-empty");

  sc.model = parse_model(require(doc, "system", "$"));

  const json& dyn = require(doc, "dynamics", "$");
  const json& kind = require(dyn, "kind", "dynamics");
  if (!kind.is_string()) schema_error("dynamics.kind", "expected a string");
  try {
    sc.dynamics.kind = dynamics_kind_from_name(kind.get<std::string>());
  } catch (const Error& e) {
    schema_error("dynamics.kind", e.what());
  }
  if (dyn.contains("tau")) {
    if (dyn["tau"].is_number()) {
      sc.dynamics.tau = {as_number(dyn["tau"], "dynamics.tau")};
    } else {
      sc.dynamics.tau = parse_number_list(dyn["tau"], "dynamics.tau");
    }
    if (sc.dynamics.tau.empty()) schema_error("dynamics.tau", "must be non-empty");
  }
  if (dyn.contains("notes") && dyn["notes"].is_string()) {
    sc.dynamics.notes = dyn["notes"].get<std::string>();
  }
  try {
    sc.dynamics.validate(sc.model);
  } catch (const Error& e) {
    schema_error("dynamics", e.what());
  }

  sc.initial = parse_initial_state(require(doc, "initial_state", "$"), sc.model);

  if (doc.contains("integration")) {
    parse_integration(doc["integration"], sc.suite);
  }
  if (doc.contains("checks")) parse_checks(doc["checks"], sc);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer()) schema_error("seed", "expected an integer");
    sc.suite.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("outputs")) {
    const json& out = doc["outputs"];
    if (out.contains("report") && out["report"].is_string()) {
      sc.report_path = out["report"].get<std::string>();
    }
    if (out.contains("trajectory") && out["trajectory"].is_string()) {
      sc.trajectory_path = out["trajectory"].get<std::string>();
    }
  }
  sc.suite.tol_scale = tolerance_scale_from_env();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::InvalidArgument, "cannot open scenario: " + path);
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation,
                path + ": invalid JSON (" + e.what() + ")");
  }
  return parse_scenario(doc);
}

json report_to_json(const ComplianceReport& report) {
  json j;
  j["scenario_id"] = report.scenario_id;
  j["seed"] = report.seed;
  j["dynamics"] = {{"kind", dynamics_kind_name(report.spec.kind)},
                   {"tau", report.spec.tau}};
  j["environment"] = report.environment;
  j["pass_count"] = report.pass_count();
  j["all_pass"] = report.all_binding_pass();
  json results = json::array();
  for (const ConditionResult& r : report.results) {
    json e;
    e["condition"] = r.condition_id;
    e["status"] = check_status_name(r.status);
    e["tolerance"] = r.tolerance;
    e["metrics"] = r.metrics;
    e["narrative"] = r.narrative;
    results.push_back(std::move(e));
  }
  j["results"] = std::move(results);
  return j;
}

std::string report_to_text(const ComplianceReport& report) {
  std::ostringstream out;
  out << "scenario " << report.scenario_id << " ("
      << dynamics_kind_name(report.spec.kind) << ")\n";
  out << "cond  status  tolerance  narrative\n";
  for (const ConditionResult& r : report.results) {
    char line[64];
    std::snprintf(line, sizeof(line), "%4d  %-6s  %-9s  ", r.condition_id,
                  check_status_name(r.status),
                  format_double(r.tolerance).c_str());
    out << line << r.narrative << "\n";
  }
  out << "passed " << report.pass_count() << "/" << report.results.size()
      << "\n";
  return out.str();
}

double tolerance_scale_from_env() {
  const char* raw = std::getenv("SEAQT_TOL_SCALE");
  if (!raw || !*raw) return 1.0;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument,
                "SEAQT_TOL_SCALE must be a positive number");
  }
  return v;
}

ScenarioOutcome execute_scenario(const std::string& path,
                                 const std::string& report_override,
                                 const std::string& csv_override) {
  ScenarioOutcome out;
  out.id = std::filesystem::path(path).stem().string();
  try {
    Scenario sc = load_scenario(path);
    out.id = sc.id;
    Trajectory traj;
    ComplianceReport report =
        run_all(sc.model, sc.dynamics, sc.initial, sc.suite, sc.id, &traj);

    std::string report_path = !report_override.empty() ? report_override
                              : !sc.report_path.empty()
                                  ? sc.report_path
                                  : sc.id + "_report.json";
    std::string csv_path = !csv_override.empty() ? csv_override
                           : !sc.trajectory_path.empty()
                               ? sc.trajectory_path
                               : sc.id + "_trajectory.csv";
    {
      std::ofstream f(report_path);
      if (!f) {
        throw Error(ErrorCode::InvalidArgument,
                    "cannot write report: " + report_path);
      }
      f << report_to_json(report).dump(2) << "\n";
    }
    {
      std::ofstream f(csv_path);
      if (!f) {
        throw Error(ErrorCode::InvalidArgument,
                    "cannot write trajectory: " + csv_path);
      }
      write_csv(traj, f);
    }
    out.text = report_to_text(report);
    out.exit_code = report.all_binding_pass() ? 0 : 2;
    out.report = std::move(report);
  } catch (const Error& e) {
    out.error = std::string(error_code_name(e.code)) + ": " + e.what();
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

int run_scenario(const std::string& path, std::ostream& log,
                 const std::string& report_override,
                 const std::string& csv_override) {
  ScenarioOutcome out = execute_scenario(path, report_override, csv_override);
  if (!out.error.empty()) {
    log << "error: " << out.error << "\n";
    return 3;
  }
  log << out.text;
  return out.exit_code;
}

int run_suite(const std::string& dir, std::ostream& log, int jobs,
              const std::string& summary_path) {
  (void)jobs;  // scenarios run sequentially; results are merged by id anyway
  std::vector<std::string> files;
  {
    std::error_code ec;
    std::filesystem::directory_iterator it(dir, ec);
    if (ec) {
      log << "error: cannot read directory " << dir << "\n";
      return 3;
    }
    for (const auto& entry : it) {
      if (entry.path().extension() == ".json") {
        files.push_back(entry.path().string());
      }
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    log << "warning: no scenario files in " << dir << "\n";
    return 0;
  }

  std::vector<ScenarioOutcome> outcomes;
  for (const std::string& f : files) {
    outcomes.push_back(execute_scenario(f, {}, {}));
  }
  std::sort(outcomes.begin(), outcomes.end(),
            [](const ScenarioOutcome& a, const ScenarioOutcome& b) {
              return a.id < b.id;
            });

  json agg;
  int exit_code = 0;
  log << "id                        status  passed\n";
  for (const ScenarioOutcome& o : outcomes) {
    json entry;
    const int passed = o.report ? o.report->pass_count() : 0;
    const int total =
        o.report ? static_cast<int>(o.report->results.size()) : 0;
    if (!o.error.empty()) {
      entry["status"] = "error";
      entry["error"] = o.error;
      exit_code = 3;
    } else {
      entry["status"] = o.exit_code == 0 ? "pass" : "fail";
      entry["pass_count"] = passed;
      entry["total"] = total;
      if (o.exit_code != 0 && exit_code == 0) exit_code = 2;
    }
    agg["scenarios"][o.id] = std::move(entry);
    char line[80];
    if (!o.error.empty()) {
      std::snprintf(line, sizeof(line), "%-24s  error   -", o.id.c_str());
      log << line << "  " << o.error << "\n";
    } else {
      std::snprintf(line, sizeof(line), "%-24s  %-6s  %d/%d", o.id.c_str(),
                    o.exit_code == 0 ? "pass" : "fail", passed, total);
      log << line << "\n";
    }
  }
  const std::string path =
      summary_path.empty() ? std::string("suite_summary.json") : summary_path;
  std::ofstream f(path);
  if (!f) {
    log << "error: cannot write " << path << "\n";
    return 3;
  }
  f << agg.dump(2) << "\n";
  return exit_code;
}

int validate_scenario(const std::string& path, std::ostream& log) {
  try {
    Scenario sc = load_scenario(path);
    log << "ok: " << sc.id << " (dim " << sc.model.dim() << ", "
        << dynamics_kind_name(sc.dynamics.kind) << ")\n";
    return 0;
  } catch (const Error& e) {
    log << "error: " << error_code_name(e.code) << ": " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace seaqt
