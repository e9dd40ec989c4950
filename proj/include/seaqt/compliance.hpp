#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>

#include "seaqt/integrator.hpp"

namespace seaqt {

enum class CheckStatus { pass, fail, info };

const char* check_status_name(CheckStatus status);

struct ConditionResult {
  int condition_id = 0;
  CheckStatus status = CheckStatus::info;
  std::map<std::string, double> metrics;
  double tolerance = 0.0;
  std::string narrative;
};

struct AffinityFrame {
  std::vector<Matrix> basis;  // traceless orthonormal X'_j (identity separate)
  RealVector f;               // entropy-operator components at the last probe
  double f0 = 0.0;
  RealVector f_e;
  double f0e = 0.0;
  RealVector rates;           // dissipative rates D x_i / Dt at the last probe
  RealMatrix L;               // fitted conductivity matrix
  RealMatrix covariances;     // <Delta X_i Delta X_j> at equilibrium
  double entropy_production = 0.0;
};

struct ComplianceReport {
  std::string scenario_id;
  DynamicsSpec spec;
  std::vector<ConditionResult> results;
  std::map<std::string, double> environment;
  std::uint64_t seed = 0;

  int pass_count() const;
  bool all_binding_pass() const;  // every non-info result passes
};

// --- individual condition checks -----------------------------------------

// Condition 1: trajectories lie in the state domain.
ConditionResult check_domain(const Trajectory& forward,
                             const Trajectory* backward, double tol);

// Condition 2: trace, energy, and G_i functionals constant.
ConditionResult check_invariants(const Trajectory& forward,
                                 const Trajectory* backward,
                                 const SystemModel& model, double tol);

// Condition 7: separate subsystem-energy conservation for declared
// noninteracting H_parts.
ConditionResult check_subsystem_invariants(const Trajectory& forward,
                                           const SystemModel& model,
                                           double tol);

// Condition 3: pure states follow the closed-form unitary orbit.
ConditionResult check_pure_unitarity(const SystemModel& model,
                                     const DynamicsSpec& spec,
                                     const QuantumState& psi0, double horizon,
                                     double tol,
                                     const IntegratorConfig& base);

// Condition 4: rank constant and no kernel leakage.
ConditionResult check_kernel(const Trajectory& traj, double eps_ker,
                             double tol);

// Condition 5: entropy nondecreasing forward (nonincreasing on backward
// segments); slack covers integrator discretization noise.
ConditionResult check_entropy(const Trajectory& forward,
                              const Trajectory* backward, double slack);

struct EquilibriumProbeConfig {
  int perturbations = 8;
  double contraction_horizon = 20.0;
  double nd_horizon = 60.0;
  double epsilon_kernel = 1e-3;  // occupation moved into the kernel direction
  double stationarity_tol = 1e-10;
  double contraction_ratio_max = 0.9;
  // Composite dynamics settles on a manifold of stationary states (vanishing
  // dissipator, correlations frozen) rather than at a single point; this
  // bounds how precisely perturbed trajectories must reach that manifold.
  double manifold_stationarity_tol = 1e-8;
  std::uint64_t seed = 1;
};

// Condition 6: stationarity of the Gibbs state, local attraction, and
// non-global-stability of a rank-deficient rho_nd.
ConditionResult check_equilibrium(const SystemModel& model,
                                  const DynamicsSpec& spec,
                                  const QuantumState& rho0,
                                  const EquilibriumProbeConfig& cfg,
                                  const IntegratorConfig& base);

struct SeparabilityConfig {
  double horizon = 10.0;
  int samples = 81;
  double product_tol = 1e-7;
  double mi_step_slack = 1e-8;
  std::uint64_t seed = 1;
};

// Conditions 8 and 9 on a noninteracting bipartite model; returns one result
// per condition. The no-signaling probe is reported inside condition 9 as an
// informational metric.
std::vector<ConditionResult> check_separability(const SystemModel& model,
                                                const DynamicsSpec& spec,
                                                const SeparabilityConfig& cfg,
                                                const IntegratorConfig& base);

struct OnsagerConfig {
  int probes_per_direction = 4;
  double delta = 1e-4;
  double fd_step = 1e-5;
  double sym_tol = 1e-2;
  double psd_tol = 1e-8;
  double production_tol = 1e-2;   // relative, entropy-production identity
  double fluctuation_tol = 1e-9;  // relative, exact identity
  double expansion_tol = 1e-9;
  // Singular values of the affinity ensemble below this fraction of the
  // largest are treated as constraint-suppressed directions.
  double rank_rel_threshold = 1e-3;
  std::uint64_t seed = 1;
  bool check_gradient = false;    // central-difference affinity gradients
  double gradient_tol = 1e-4;
};

struct OnsagerAnalysis {
  AffinityFrame frame;
  ConditionResult result;
};

// Condition 10: exponential-representation relations, entropy-production
// identity, fluctuation identity, and the regression-estimated conductivity
// matrix L (symmetry + non-negativity). Constraint operators beyond H and the
// G_i (e.g. embedded subsystem Hamiltonians for composite dynamics) may be
// supplied via extra_constraints.
OnsagerAnalysis onsager_analysis(const SystemModel& model,
                                 const DynamicsSpec& spec,
                                 const QuantumState& reference,
                                 const OnsagerConfig& cfg,
                                 std::span<const Matrix> extra_constraints = {});

// --- full suite ------------------------------------------------------------

struct SuiteConfig {
  std::vector<int> conditions;  // empty = every applicable condition
  std::map<int, double> tol_overrides;
  IntegratorConfig integration;  // sample_times ignored; built from t_final
  double t_final = 50.0;
  int samples = 200;
  double backward_horizon = 0.0;
  int backward_samples = 41;
  double eps_ker = 1e-8;  // kernel-check threshold
  std::uint64_t seed = 1;
  double tol_scale = 1.0;  // global tolerance profile multiplier
};

ComplianceReport run_all(const SystemModel& model, const DynamicsSpec& spec,
                         const QuantumState& rho0, const SuiteConfig& cfg,
                         const std::string& scenario_id,
                         Trajectory* main_trajectory_out = nullptr);

// Default per-condition tolerances used by run_all (before overrides).
double default_condition_tolerance(int condition_id);

// Conditions that apply to the given model (7-9 need a declared
// noninteracting bipartite partition).
std::vector<int> applicable_conditions(const SystemModel& model);

}  // namespace seaqt
