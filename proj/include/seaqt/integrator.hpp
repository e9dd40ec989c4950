#pragma once

#include <iosfwd>
#include <vector>

#include "seaqt/dynamics.hpp"

namespace seaqt {

enum class RepairMode { raw, strict };

struct IntegratorConfig {
  double rtol = 1e-9;
  double atol = 1e-11;
  double dt_init = 1e-3;
  double dt_max = 1.0;
  RepairMode mode = RepairMode::raw;
  // Strictly monotone, first entry 0; negative spans integrate backward.
  std::vector<double> sample_times;
  double eps_ker = 1e-10;  // rank-telemetry threshold

  static std::vector<double> linspace(double t_final, int samples);
};

struct SampleRecord {
  double t = 0.0;
  double trace = 0.0;
  double e = 0.0;
  std::vector<double> g;
  std::vector<double> subsystem_energies;  // empty without declared H_parts
  double entropy = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int rank = 0;
  double dnorm = 0.0;               // ||D_M||_F at the sample
  double mutual_information = 0.0;  // NaN without a partition
  double err_estimate = 0.0;        // worst step error since previous sample
  double symmetry_deviation = 0.0;  // worst logged pre-symmetrization defect
};

struct Trajectory {
  std::vector<double> times;
  std::vector<QuantumState> states;
  std::vector<SampleRecord> records;
  bool complete = true;
  std::string diagnosis;  // StepUnderflow details for partial trajectories
};

// Adaptive Dormand-Prince 4(5) propagation of
// d rho / dt = hamiltonian_term + dissipative_term. Accepted steps are
// symmetrized (deviation logged); strict mode additionally renormalizes the
// trace, raw mode applies no repairs.
Trajectory propagate(const SystemModel& model, const DynamicsSpec& spec,
                     const QuantumState& rho0, const IntegratorConfig& config);

// Fixed column order:
// t,entropy,trace,e,g_0..,lambda_min,lambda_max,rank,dnorm,mutual_information
void write_csv(const Trajectory& traj, std::ostream& out);

}  // namespace seaqt
