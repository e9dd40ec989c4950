#include "seaqt/dynamics.hpp"

#include <cmath>

namespace seaqt {

const char* dynamics_kind_name(DynamicsKind kind) {
  switch (kind) {
    case DynamicsKind::unitary: return "unitary";
    case DynamicsKind::sea_single: return "sea_single";
    case DynamicsKind::sea_composite: return "sea_composite";
    case DynamicsKind::naive_relaxation: return "naive_relaxation";
  }
  return "unknown";
}

DynamicsKind dynamics_kind_from_name(const std::string& name) {
  if (name == "unitary") return DynamicsKind::unitary;
  if (name == "sea_single") return DynamicsKind::sea_single;
  if (name == "sea_composite") return DynamicsKind::sea_composite;
  if (name == "naive_relaxation") return DynamicsKind::naive_relaxation;
  throw Error(ErrorCode::SchemaViolation, "unknown dynamics kind: " + name);
}

double DynamicsSpec::tau_for(size_t subsystem) const {
  if (tau.empty()) return 1.0;
  return tau[std::min(subsystem, tau.size() - 1)];
}

void DynamicsSpec::validate(const SystemModel& model) const {
  for (double t : tau) {
    if (!(t > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "tau must be positive", t);
    }
  }
  if (kind == DynamicsKind::sea_composite && !model.bipartite()) {
    throw Error(ErrorCode::PartitionUndeclared,
                "sea_composite requires a declared bipartite partition");
  }
}

Matrix von_neumann_term(const SystemModel& model, const QuantumState& rho) {
  if (rho.dim != model.H.dim) {
    throw Error(ErrorCode::DimensionMismatch, "state/model dimension mismatch");
  }
  const Matrix& h = model.H.matrix;
  Matrix out = Complex(0, -1.0 / model.constants.hbar) *
               (h * rho.matrix - rho.matrix * h);
  symmetrize(out);
  return out;
}

Observable locally_perceived(const SystemModel& model, const QuantumState& rho,
                             const Observable& x, int subsystem) {
  if (!model.bipartite()) {
    throw Error(ErrorCode::PartitionUndeclared,
                "locally_perceived requires a bipartite partition");
  }
  const int da = model.subsystem_dims[0];
  const int db = model.subsystem_dims[1];
  const Matrix& xm = x.matrix;
  if (subsystem == 0) {
    const Matrix rho_b = partial_trace(rho.matrix, da, db, 1);
    Matrix out = Matrix::Zero(da, da);
    for (int i = 0; i < da; ++i)
      for (int j = 0; j < da; ++j)
        for (int k = 0; k < db; ++k)
          for (int m = 0; m < db; ++m)
            out(i, j) += rho_b(k, m) * xm(i * db + m, j * db + k);
    symmetrize(out);
    return Observable(std::move(out), 1e-9);
  }
  const Matrix rho_a = partial_trace(rho.matrix, da, db, 0);
  Matrix out = Matrix::Zero(db, db);
  for (int k = 0; k < db; ++k)
    for (int l = 0; l < db; ++l)
      for (int i = 0; i < da; ++i)
        for (int ip = 0; ip < da; ++ip)
          out(k, l) += rho_a(i, ip) * xm(ip * db + k, i * db + l);
  symmetrize(out);
  return Observable(std::move(out), 1e-9);
}

Matrix sea_dissipator_single(const SystemModel& model, const QuantumState& rho,
                             double tau, double eps_ker) {
  const double k_B = model.constants.k_B;
  EffectiveSubspace es = effective_subspace(rho, model, eps_ker);
  const int dp = es.dim();
  if (dp <= 1) {
    // Pure state: one-dimensional support, ln rho' = 0.
    return Matrix::Zero(rho.dim, rho.dim);
  }
  Matrix g = -k_B * herm_log(es.rho);
  std::vector<Matrix> constraints;
  constraints.push_back(Matrix::Identity(dp, dp));
  constraints.push_back(es.H);
  for (const Matrix& gi : es.invariants) constraints.push_back(gi);
  Matrix dp_mat = project_orth(constraints, g) / (k_B * tau);
  Matrix out = es.embed(dp_mat);
  symmetrize(out);
  return out;
}

Matrix sea_dissipator_composite(const SystemModel& model,
                                const QuantumState& rho,
                                std::span<const double> tau, double eps_ker) {
  if (!model.bipartite()) {
    throw Error(ErrorCode::PartitionUndeclared,
                "sea_composite requires a bipartite partition");
  }
  const double k_B = model.constants.k_B;
  const Observable s_op = entropy_operator(rho, k_B, eps_ker);
  const Matrix rho_a =
      partial_trace(rho.matrix, model.subsystem_dims[0], model.subsystem_dims[1], 0);
  const Matrix rho_b =
      partial_trace(rho.matrix, model.subsystem_dims[0], model.subsystem_dims[1], 1);

  std::vector<Matrix> local_d(2);
  for (int part = 0; part < 2; ++part) {
    const int d_local = model.subsystem_dims[part];
    const Matrix g_local = locally_perceived(model, rho, s_op, part).matrix;
    std::vector<Matrix> constraints;
    constraints.push_back(Matrix::Identity(d_local, d_local));
    constraints.push_back(locally_perceived(model, rho, model.H, part).matrix);
    for (const Observable& gi : model.invariants) {
      constraints.push_back(locally_perceived(model, rho, gi, part).matrix);
    }
    const double t = tau.empty() ? 1.0 : tau[std::min<size_t>(part, tau.size() - 1)];
    local_d[part] = project_orth(constraints, g_local) / (k_B * t);
  }
  Matrix out = kron(local_d[0], rho_b) + kron(rho_a, local_d[1]);
  symmetrize(out);
  return out;
}

Matrix naive_relaxation(const SystemModel& model, const QuantumState& rho,
                        double tau_r) {
  std::vector<double> g_now;
  for (const Observable& g : model.invariants) {
    g_now.push_back(expectation(rho, g));
  }
  const GibbsSolution eq = solve_gibbs(model, expectation(rho, model.H), g_now);
  return -(rho.matrix - eq.state.matrix) / tau_r;
}

MotionTerms motion(const SystemModel& model, const DynamicsSpec& spec,
                   const QuantumState& rho, double eps_ker) {
  MotionTerms terms;
  terms.hamiltonian_term = von_neumann_term(model, rho);
  switch (spec.kind) {
    case DynamicsKind::unitary:
      terms.dissipative_term = Matrix::Zero(rho.dim, rho.dim);
      break;
    case DynamicsKind::sea_single:
      terms.dissipative_term =
          sea_dissipator_single(model, rho, spec.tau_for(0), eps_ker);
      break;
    case DynamicsKind::sea_composite:
      terms.dissipative_term =
          sea_dissipator_composite(model, rho, spec.tau, eps_ker);
      break;
    case DynamicsKind::naive_relaxation:
      terms.dissipative_term = naive_relaxation(model, rho, spec.tau_for(0));
      break;
  }
  terms.diagnostics.symmetry_deviation =
      hermiticity_deviation(terms.dissipative_term);
  const Matrix& d = terms.dissipative_term;
  terms.diagnostics.trace_d = d.trace().real();
  terms.diagnostics.trace_dh = (d * model.H.matrix).trace().real();
  for (const Observable& g : model.invariants) {
    terms.diagnostics.trace_dg.push_back((d * g.matrix).trace().real());
  }
  terms.diagnostics.entropy_production =
      trace_inner(d, entropy_operator(rho, model.constants.k_B, eps_ker).matrix);
  return terms;
}

}  // namespace seaqt
