#include "seaqt/state.hpp"

#include <cmath>
#include <numeric>

namespace seaqt {

QuantumState QuantumState::unchecked(Matrix m, std::string label) {
  QuantumState s;
  s.dim = static_cast<int>(m.rows());
  s.matrix = std::move(m);
  s.label = std::move(label);
  return s;
}

Observable::Observable(Matrix m, double herm_tol) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::InvalidArgument, "observable matrix not square");
  }
  const double dev = hermiticity_deviation(m);
  if (dev > herm_tol) {
    throw Error(ErrorCode::NotHermitian, "observable not Hermitian", dev);
  }
  dim = static_cast<int>(m.rows());
  matrix = std::move(m);
  symmetrize(matrix);
}

int SystemModel::dim() const {
  return std::accumulate(subsystem_dims.begin(), subsystem_dims.end(), 1,
                         std::multiplies<int>());
}

Matrix SystemModel::embedded_part(int part) const {
  if (!bipartite() || !H_parts || H_parts->size() != 2) {
    throw Error(ErrorCode::PartitionUndeclared,
                "embedded_part requires a bipartite model with H_parts");
  }
  const Matrix& local = (*H_parts)[part].matrix;
  if (part == 0) {
    return kron(local, Matrix::Identity(subsystem_dims[1], subsystem_dims[1]));
  }
  return kron(Matrix::Identity(subsystem_dims[0], subsystem_dims[0]), local);
}

void SystemModel::validate() const {
  const int d = dim();
  if (H.dim != d) {
    throw Error(ErrorCode::DimensionMismatch,
                "H dimension does not match subsystem_dims product");
  }
  if (constants.k_B <= 0 || constants.hbar <= 0) {
    throw Error(ErrorCode::InvalidArgument, "k_B and hbar must be positive");
  }
  auto comm_check = [](const Matrix& a, const Matrix& b, const char* what) {
    const double bound = 1e-10 * std::max(fro_norm(a) * fro_norm(b), 1e-300);
    const double dev = fro_norm(a * b - b * a);
    if (dev > bound) {
      throw Error(ErrorCode::InvalidArgument, what, dev);
    }
  };
  for (size_t i = 0; i < invariants.size(); ++i) {
    if (invariants[i].dim != d) {
      throw Error(ErrorCode::DimensionMismatch, "G_i dimension mismatch");
    }
    comm_check(H.matrix, invariants[i].matrix, "[H, G_i] != 0");
    for (size_t j = i + 1; j < invariants.size(); ++j) {
      comm_check(invariants[i].matrix, invariants[j].matrix, "[G_i, G_j] != 0");
    }
  }
  if (H_parts) {
    if (!bipartite() || H_parts->size() != 2) {
      throw Error(ErrorCode::PartitionUndeclared,
                  "H_parts requires exactly two declared subsystems");
    }
    for (int part = 0; part < 2; ++part) {
      if ((*H_parts)[part].dim != subsystem_dims[part]) {
        throw Error(ErrorCode::DimensionMismatch, "H_parts dimension mismatch");
      }
    }
    const Matrix sum = embedded_part(0) + embedded_part(1);
    const double dev = fro_norm(H.matrix - sum);
    if (dev > 1e-10 * std::max(fro_norm(H.matrix), 1e-300)) {
      throw Error(ErrorCode::InvalidArgument,
                  "H does not equal the sum of embedded H_parts", dev);
    }
  }
}

Matrix EffectiveSubspace::embed(const Matrix& op) const {
  return support_basis * op * support_basis.adjoint();
}

QuantumState validate_state(const Matrix& m, const StateTol& tol,
                            std::string label) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::InvalidArgument, "state matrix not square");
  }
  const double herm_dev = hermiticity_deviation(m);
  if (herm_dev > tol.herm) {
    throw Error(ErrorCode::NotHermitian, "state not Hermitian", herm_dev);
  }
  const double trace_dev = std::abs(m.trace() - Complex(1.0, 0.0));
  if (trace_dev > tol.trace) {
    throw Error(ErrorCode::TraceDeviation, "state trace deviates from 1",
                trace_dev);
  }
  const double min_eig = eigh(m).values.minCoeff();
  if (min_eig < -tol.eig) {
    throw Error(ErrorCode::NegativeEigenvalue, "state has negative eigenvalue",
                min_eig);
  }
  QuantumState out = QuantumState::unchecked(m, std::move(label));
  symmetrize(out.matrix);
  return out;
}

double expectation(const QuantumState& rho, const Observable& x) {
  if (rho.dim != x.dim) {
    throw Error(ErrorCode::DimensionMismatch,
                "state/observable dimension mismatch");
  }
  const Complex val = (rho.matrix * x.matrix).trace();
  return val.real();
}

double entropy(const QuantumState& rho, double k_B) {
  const RealVector w = eigh(rho.matrix).values;
  double s = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (w[k] > 0.0) s -= w[k] * std::log(w[k]);
  }
  return std::max(0.0, k_B * s);
}

namespace {

// Support eigenpairs of rho: eigenvalue above eps_ker * lambda_max.
std::pair<RealVector, Matrix> support_pairs(const Matrix& rho,
                                            double eps_ker) {
  Eigh e = eigh(rho);
  const double lmax = e.values.maxCoeff();
  const double thresh = eps_ker * std::max(lmax, 0.0);
  std::vector<int> keep;
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    if (e.values[k] > thresh) keep.push_back(static_cast<int>(k));
  }
  RealVector vals(keep.size());
  Matrix vecs(rho.rows(), keep.size());
  for (size_t k = 0; k < keep.size(); ++k) {
    vals[static_cast<Eigen::Index>(k)] = e.values[keep[k]];
    vecs.col(static_cast<Eigen::Index>(k)) = e.vectors.col(keep[k]);
  }
  return {vals, vecs};
}

}  // namespace

Observable support_projector(const QuantumState& rho, double eps_ker) {
  auto [vals, vecs] = support_pairs(rho.matrix, eps_ker);
  Matrix b = vecs * vecs.adjoint();
  symmetrize(b);
  return Observable(b);
}

Observable entropy_operator(const QuantumState& rho, double k_B,
                            double eps_ker) {
  auto [vals, vecs] = support_pairs(rho.matrix, eps_ker);
  RealVector w(vals.size());
  for (Eigen::Index k = 0; k < vals.size(); ++k) w[k] = -k_B * std::log(vals[k]);
  Matrix s = vecs * w.asDiagonal() * vecs.adjoint();
  symmetrize(s);
  return Observable(s);
}

EffectiveSubspace effective_subspace(const QuantumState& rho,
                                     const SystemModel& model,
                                     double eps_ker) {
  auto [vals, vecs] = support_pairs(rho.matrix, eps_ker);
  EffectiveSubspace es;
  es.parent_dim = rho.dim;
  es.support_basis = vecs;
  es.rho = vecs.adjoint() * rho.matrix * vecs;
  symmetrize(es.rho);
  es.H = vecs.adjoint() * model.H.matrix * vecs;
  symmetrize(es.H);
  for (const Observable& g : model.invariants) {
    Matrix gr = vecs.adjoint() * g.matrix * vecs;
    symmetrize(gr);
    es.invariants.push_back(std::move(gr));
  }
  return es;
}

QuantumState tensor_product(const QuantumState& a, const QuantumState& b) {
  return QuantumState::unchecked(kron(a.matrix, b.matrix));
}

Observable tensor_product(const Observable& a, const Observable& b) {
  return Observable(kron(a.matrix, b.matrix));
}

Matrix partial_trace(const Matrix& m, int dim_a, int dim_b, int keep) {
  if (m.rows() != static_cast<Eigen::Index>(dim_a) * dim_b) {
    throw Error(ErrorCode::DimensionMismatch, "partial trace dims mismatch");
  }
  if (keep == 0) {
    Matrix out = Matrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_a; ++j)
        for (int k = 0; k < dim_b; ++k)
          out(i, j) += m(i * dim_b + k, j * dim_b + k);
    return out;
  }
  Matrix out = Matrix::Zero(dim_b, dim_b);
  for (int k = 0; k < dim_b; ++k)
    for (int l = 0; l < dim_b; ++l)
      for (int i = 0; i < dim_a; ++i)
        out(k, l) += m(i * dim_b + k, i * dim_b + l);
  return out;
}

QuantumState partial_trace(const QuantumState& rho, const SystemModel& model,
                           int keep) {
  if (!model.bipartite()) {
    throw Error(ErrorCode::PartitionUndeclared,
                "partial trace requires a declared bipartite partition");
  }
  Matrix out = partial_trace(rho.matrix, model.subsystem_dims[0],
                             model.subsystem_dims[1], keep);
  symmetrize(out);
  return QuantumState::unchecked(std::move(out));
}

double covariance(const QuantumState& rho, const Observable& x,
                  const Observable& y) {
  if (rho.dim != x.dim || rho.dim != y.dim) {
    throw Error(ErrorCode::DimensionMismatch, "covariance dimension mismatch");
  }
  const double anti =
      0.5 * ((rho.matrix * (x.matrix * y.matrix + y.matrix * x.matrix))
                 .trace())
                .real();
  return anti - expectation(rho, x) * expectation(rho, y);
}

double mutual_information(const QuantumState& rho, const SystemModel& model) {
  const QuantumState a = partial_trace(rho, model, 0);
  const QuantumState b = partial_trace(rho, model, 1);
  const double k_B = model.constants.k_B;
  return entropy(a, k_B) + entropy(b, k_B) - entropy(rho, k_B);
}

}  // namespace seaqt
