#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "seaqt/integrator.hpp"

using namespace seaqt;

namespace {

QuantumState random_full_rank_state(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(n(rng), n(rng));
  Matrix m = a * a.adjoint() + 1e-3 * Matrix::Identity(d, d);
  m /= m.trace();
  return validate_state(m);
}

SystemModel two_level_model(double gap = 1.0) {
  SystemModel model;
  model.subsystem_dims = {2};
  Matrix h = Matrix::Zero(2, 2);
  h.diagonal() << 0.0, gap;
  model.H = Observable(h);
  return model;
}

IntegratorConfig config_to(double t_final, int samples) {
  IntegratorConfig cfg;
  cfg.sample_times = IntegratorConfig::linspace(t_final, samples);
  return cfg;
}

}  // namespace

TEST_CASE("linspace spans [0, t_final] with uniform spacing") {
  const std::vector<double> t = IntegratorConfig::linspace(10.0, 5);
  REQUIRE(t.size() == 5);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == doctest::Approx(10.0));
  for (size_t k = 1; k < t.size(); ++k) {
    CHECK(t[k] - t[k - 1] == doctest::Approx(2.5));
  }
}

TEST_CASE("unitary evolution matches the closed-form phase rotation") {
  // For H = diag(0, w), rho_01(t) = rho_01(0) e^{i w t / hbar}; populations
  // frozen. Oracle is the analytic solution, not the integrator.
  const double w = 1.7;
  const SystemModel model = two_level_model(w);
  DynamicsSpec spec;
  spec.kind = DynamicsKind::unitary;
  Matrix rho0(2, 2);
  rho0 << 0.7, Complex(0.2, -0.1), Complex(0.2, 0.1), 0.3;

  const Trajectory traj =
      propagate(model, spec, validate_state(rho0), config_to(12.0, 49));
  REQUIRE(traj.complete);
  for (size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    const Complex phase = std::exp(Complex(0.0, w * t));
    Matrix want = rho0;
    want(0, 1) = rho0(0, 1) * phase;
    want(1, 0) = std::conj(want(0, 1));
    CHECK(trace_distance(traj.states[k].matrix, want) < 1e-8);
  }
}

TEST_CASE("invariants stay constant along a dissipative trajectory") {
  SystemModel model;
  model.subsystem_dims = {3};
  Matrix h = Matrix::Zero(3, 3);
  h.diagonal() << 0.0, 1.0, 2.0;
  model.H = Observable(h);
  Matrix g = Matrix::Zero(3, 3);
  g.diagonal() << 1.0, 1.0, 0.0;
  model.invariants.push_back(Observable(g));
  DynamicsSpec spec;
  spec.kind = DynamicsKind::sea_single;

  std::mt19937_64 rng(61);
  const QuantumState rho0 = random_full_rank_state(3, rng);
  const double e0 = trace_inner(h, rho0.matrix);
  const double g0 = trace_inner(g, rho0.matrix);

  const Trajectory traj = propagate(model, spec, rho0, config_to(50.0, 101));
  REQUIRE(traj.complete);
  for (const SampleRecord& rec : traj.records) {
    CHECK(std::abs(rec.trace - 1.0) < 1e-9);
    CHECK(std::abs(rec.e - e0) < 1e-8);
    REQUIRE(rec.g.size() == 1);
    CHECK(std::abs(rec.g[0] - g0) < 1e-8);
  }
  // Entropy telemetry is monotone for steepest entropy ascent.
  for (size_t k = 1; k < traj.records.size(); ++k) {
    CHECK(traj.records[k].entropy >= traj.records[k - 1].entropy - 1e-10);
  }
}

TEST_CASE("backward integration retraces the forward trajectory") {
  const SystemModel model = two_level_model();
  DynamicsSpec spec;
  spec.kind = DynamicsKind::sea_single;
  std::mt19937_64 rng(67);
  const QuantumState rho0 = random_full_rank_state(2, rng);

  const Trajectory fwd = propagate(model, spec, rho0, config_to(2.0, 21));
  REQUIRE(fwd.complete);

  IntegratorConfig back;
  back.sample_times = {0.0, -0.5, -1.0, -1.5, -2.0};
  const Trajectory bwd = propagate(model, spec, fwd.states.back(), back);
  REQUIRE(bwd.complete);
  CHECK(trace_distance(bwd.states.back().matrix, rho0.matrix) < 1e-8);
  // Intermediate point too: t = 1.0 forward matches -1.0 from the end.
  CHECK(trace_distance(bwd.states[2].matrix, fwd.states[10].matrix) < 1e-8);
}

TEST_CASE("tightening tolerances converges the endpoint") {
  SystemModel model;
  model.subsystem_dims = {3};
  Matrix h = Matrix::Zero(3, 3);
  h.diagonal() << 0.0, 1.0, 2.0;
  model.H = Observable(h);
  DynamicsSpec spec;
  spec.kind = DynamicsKind::sea_single;
  std::mt19937_64 rng(71);
  const QuantumState rho0 = random_full_rank_state(3, rng);

  auto endpoint = [&](double rtol) {
    IntegratorConfig cfg = config_to(5.0, 6);
    cfg.rtol = rtol;
    cfg.atol = rtol * 1e-2;
    return propagate(model, spec, rho0, cfg).states.back().matrix;
  };
  const Matrix ref = endpoint(1e-12);
  const double err6 = trace_distance(endpoint(1e-6), ref);
  const double err9 = trace_distance(endpoint(1e-9), ref);
  CHECK(err6 < 1e-5);
  CHECK(err9 < 1e-8);
  CHECK(err9 <= err6 + 1e-12);
}

TEST_CASE("strict mode pins the trace exactly") {
  const SystemModel model = two_level_model();
  DynamicsSpec spec;
  spec.kind = DynamicsKind::sea_single;
  std::mt19937_64 rng(73);
  const QuantumState rho0 = random_full_rank_state(2, rng);
  IntegratorConfig cfg = config_to(10.0, 21);
  cfg.mode = RepairMode::strict;
  const Trajectory traj = propagate(model, spec, rho0, cfg);
  for (const QuantumState& st : traj.states) {
    CHECK(std::abs(st.matrix.trace().real() - 1.0) < 1e-14);
  }
}

TEST_CASE("sample telemetry reports rank and dissipator norm") {
  SystemModel model;
  model.subsystem_dims = {3};
  Matrix h = Matrix::Zero(3, 3);
  h.diagonal() << 0.0, 1.0, 2.0;
  model.H = Observable(h);
  DynamicsSpec spec;
  spec.kind = DynamicsKind::sea_single;
  Matrix m = Matrix::Zero(3, 3);
  m.diagonal() << 0.75, 0.25, 0.0;
  m(0, 1) = m(1, 0) = 0.1;  // coherence on the support keeps D nonzero at t=0

  const Trajectory traj =
      propagate(model, spec, validate_state(m), config_to(20.0, 41));
  REQUIRE(traj.complete);
  for (const SampleRecord& rec : traj.records) {
    CHECK(rec.rank == 2);  // kernel preserved along the whole run
    CHECK(rec.dnorm >= 0.0);
  }
  // The dissipator decays as the restricted equilibrium is approached.
  CHECK(traj.records.back().dnorm < 1e-6);
  CHECK(traj.records.front().dnorm > 1e-3);
}

TEST_CASE("mutual information telemetry requires a partition") {
  const SystemModel model = two_level_model();
  DynamicsSpec spec;
  spec.kind = DynamicsKind::unitary;
  std::mt19937_64 rng(79);
  const Trajectory traj = propagate(model, spec, random_full_rank_state(2, rng),
                                    config_to(1.0, 3));
  for (const SampleRecord& rec : traj.records) {
    CHECK(std::isnan(rec.mutual_information));
  }
}

TEST_CASE("csv export has the documented fixed column order") {
  const SystemModel model = two_level_model();
  DynamicsSpec spec;
  spec.kind = DynamicsKind::sea_single;
  std::mt19937_64 rng(83);
  const Trajectory traj = propagate(model, spec, random_full_rank_state(2, rng),
                                    config_to(1.0, 3));
  std::ostringstream out;
  write_csv(traj, out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "t,entropy,trace,e,lambda_min,lambda_max,rank,dnorm,"
        "mutual_information");
  int rows = 0;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("sample times must be strictly monotone from zero") {
  const SystemModel model = two_level_model();
  DynamicsSpec spec;
  spec.kind = DynamicsKind::unitary;
  std::mt19937_64 rng(89);
  const QuantumState rho0 = random_full_rank_state(2, rng);
  IntegratorConfig bad;
  bad.sample_times = {0.0, 1.0, 0.5};
  CHECK_THROWS_AS(propagate(model, spec, rho0, bad), Error);
  bad.sample_times = {1.0, 2.0};
  CHECK_THROWS_AS(propagate(model, spec, rho0, bad), Error);
}
