#pragma once

#include <optional>
#include <string>
#include <vector>

#include "seaqt/linalg.hpp"

namespace seaqt {

// Membership tolerances for the state domain: Hermiticity, unit trace,
// non-negativity.
struct StateTol {
  double herm = 1e-12;
  double trace = 1e-10;
  double eig = 1e-10;

  StateTol scaled(double s) const { return {herm * s, trace * s, eig * s}; }
};

// Unit-trace Hermitian non-negative matrix; a (possibly mixed) state without
// the idempotence restriction.
struct QuantumState {
  int dim = 0;
  Matrix matrix;
  std::string label;

  // Bypasses domain validation; for internal use where intermediate values
  // can sit slightly outside the state domain (integrator stages).
  static QuantumState unchecked(Matrix m, std::string label = {});
};

struct Observable {
  int dim = 0;
  Matrix matrix;

  Observable() = default;
  explicit Observable(Matrix m, double herm_tol = 1e-10);
};

struct Constants {
  double k_B = 1.0;
  double hbar = 1.0;
};

struct SystemModel {
  std::vector<int> subsystem_dims;
  Observable H;
  std::vector<Observable> invariants;  // the commuting G_i
  // Local Hamiltonians; when present declares H = H_A (x) I + I (x) H_B.
  std::optional<std::vector<Observable>> H_parts;
  Constants constants;

  int dim() const;
  bool bipartite() const { return subsystem_dims.size() == 2; }
  bool noninteracting() const { return H_parts.has_value(); }

  // H_J embedded into the full space (bipartite only).
  Matrix embedded_part(int part) const;

  // Commutation of H with every G_i, pairwise commutation of the G_i, and
  // consistency of H with declared H_parts.
  void validate() const;
};

// Support basis of a state together with the operators of the model system
// restricted to it.
struct EffectiveSubspace {
  int parent_dim = 0;
  Matrix support_basis;  // parent_dim x d', orthonormal columns
  Matrix rho;            // d' x d', strictly positive
  Matrix H;
  std::vector<Matrix> invariants;

  int dim() const { return static_cast<int>(rho.rows()); }
  // Lift a d' x d' operator back to the parent space, zero on the kernel.
  Matrix embed(const Matrix& op) const;
};

// Checks the three P-membership invariants and throws the first violated one
// (NotHermitian, TraceDeviation, NegativeEigenvalue), each carrying the
// measured deviation.
QuantumState validate_state(const Matrix& m, const StateTol& tol = {},
                            std::string label = {});

double expectation(const QuantumState& rho, const Observable& x);

// -k_B Tr(rho ln rho) with the 0 ln 0 = 0 convention.
double entropy(const QuantumState& rho, double k_B = 1.0);

// Idempotent projector onto the support; eigenvalues below
// eps_ker * lambda_max count as zero.
Observable support_projector(const QuantumState& rho, double eps_ker = 1e-12);

// S = -k_B B ln rho, computed spectrally on the support, zero on the kernel.
Observable entropy_operator(const QuantumState& rho, double k_B = 1.0,
                            double eps_ker = 1e-12);

EffectiveSubspace effective_subspace(const QuantumState& rho,
                                     const SystemModel& model,
                                     double eps_ker = 1e-12);

QuantumState tensor_product(const QuantumState& a, const QuantumState& b);
Observable tensor_product(const Observable& a, const Observable& b);

// Reduced operator over the kept bipartite factor (low-level form).
Matrix partial_trace(const Matrix& m, int dim_a, int dim_b, int keep);
QuantumState partial_trace(const QuantumState& rho, const SystemModel& model,
                           int keep);

// (1/2) Tr(rho {X,Y}) - Tr(rho X) Tr(rho Y).
double covariance(const QuantumState& rho, const Observable& x,
                  const Observable& y);

// s(rho_A) + s(rho_B) - s(rho); correlation monitor for bipartite models.
double mutual_information(const QuantumState& rho, const SystemModel& model);

}  // namespace seaqt
