#pragma once

#include <span>
#include <vector>

#include "seaqt/state.hpp"

namespace seaqt {

struct GibbsSolution {
  double beta = 0.0;
  std::vector<double> nu;
  QuantumState state;
  double s_max = 0.0;
  std::vector<double> residuals;  // per-constraint deviations at the solution
};

// Maximum-entropy state for a family of mutually commuting constraint
// operators: rho = exp(sum_k theta_k O_k) / Z with Tr(rho O_k) = target_k.
struct MaxEntSolution {
  std::vector<double> multipliers;  // theta_k
  QuantumState state;
  double s_max = 0.0;
  std::vector<double> residuals;
};

MaxEntSolution max_entropy_state(std::span<const Matrix> ops,
                                 std::span<const double> targets,
                                 double k_B = 1.0);

// exp(-beta H + sum_i nu_i G_i) / Z.
QuantumState gibbs_density(const SystemModel& model, double beta,
                           std::span<const double> nu = {});

// Solves for (beta, nu) such that Tr(rho H) = e_target and
// Tr(rho G_i) = g_targets[i]; damped Newton with the exact covariance
// Jacobian, bisection fallback when only H is constrained.
GibbsSolution solve_gibbs(const SystemModel& model, double e_target,
                          std::span<const double> g_targets = {});

// Maximum-entropy state constrained to the support of the idempotent B
// (commuting case): rho_nd = B exp(-beta H + sum nu G) B / Tr(...).
QuantumState nd_state(const SystemModel& model, const Observable& B,
                      double e_target, std::span<const double> g_targets = {});

}  // namespace seaqt
