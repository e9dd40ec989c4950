#pragma once

#include <span>
#include <string>
#include <vector>

#include "seaqt/equilibrium.hpp"

namespace seaqt {

enum class DynamicsKind { unitary, sea_single, sea_composite, naive_relaxation };

const char* dynamics_kind_name(DynamicsKind kind);
DynamicsKind dynamics_kind_from_name(const std::string& name);

struct DynamicsSpec {
  DynamicsKind kind = DynamicsKind::unitary;
  std::vector<double> tau{1.0};  // one entry, or one per subsystem
  std::string notes;

  double tau_for(size_t subsystem) const;
  void validate(const SystemModel& model) const;
};

struct MotionDiagnostics {
  double trace_d = 0.0;
  double trace_dh = 0.0;
  std::vector<double> trace_dg;
  double entropy_production = 0.0;  // Tr(D * (-k_B B ln rho))
  double symmetry_deviation = 0.0;  // pre-symmetrization Hermiticity defect
};

struct MotionTerms {
  Matrix hamiltonian_term;
  Matrix dissipative_term;
  MotionDiagnostics diagnostics;
};

// -(i/hbar) [H, rho].
Matrix von_neumann_term(const SystemModel& model, const QuantumState& rho);

// Local observable perceived by subsystem J, weighted by the reduced state of
// the complement: (X)^J = Tr_{Jbar}[ (I_J (x) rho_{Jbar}) X ].
Observable locally_perceived(const SystemModel& model, const QuantumState& rho,
                             const Observable& x, int subsystem);

// Steepest entropy ascent under the trace metric on the effective subspace:
// the entropy gradient orthogonally projected off span{I', H', G'_i},
// divided by k_B * tau, embedded back with zeros on the kernel.
Matrix sea_dissipator_single(const SystemModel& model, const QuantumState& rho,
                             double tau, double eps_ker = 1e-12);

// Per-subsystem steepest entropy ascent on locally perceived operators:
// D = D^A (x) rho_B + rho_A (x) D^B.
Matrix sea_dissipator_composite(const SystemModel& model,
                                const QuantumState& rho,
                                std::span<const double> tau,
                                double eps_ker = 1e-12);

// Linear relaxation toward the matching Gibbs state; conserves the invariants
// but deliberately violates the pure-state and kernel conditions. Negative
// control for the compliance suite.
Matrix naive_relaxation(const SystemModel& model, const QuantumState& rho,
                        double tau_r);

MotionTerms motion(const SystemModel& model, const DynamicsSpec& spec,
                   const QuantumState& rho, double eps_ker = 1e-12);

}  // namespace seaqt
