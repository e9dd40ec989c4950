#include "seaqt/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace seaqt {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::TraceDeviation: return "TraceDeviation";
    case ErrorCode::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::PartitionUndeclared: return "PartitionUndeclared";
    case ErrorCode::NotIdempotent: return "NotIdempotent";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::OverflowGuard: return "OverflowGuard";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DegenerateProbeEnsemble: return "DegenerateProbeEnsemble";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Eigh eigh(const Matrix& m) {
  Matrix h = m;
  symmetrize(h);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NonFinite, "Hermitian eigendecomposition failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double symmetrize(Matrix& m) {
  double dev = hermiticity_deviation(m);
  m = ((m + m.adjoint()) / 2.0).eval();
  return dev;
}

double hermiticity_deviation(const Matrix& m) {
  return (m - m.adjoint().eval()).cwiseAbs().maxCoeff();
}

Matrix herm_func(const Matrix& m, const std::function<double(double)>& f) {
  Eigh e = eigh(m);
  RealVector w(e.values.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) w[k] = f(e.values[k]);
  Matrix out = e.vectors * w.asDiagonal() * e.vectors.adjoint();
  symmetrize(out);
  return out;
}

Matrix herm_log(const Matrix& m) {
  return herm_func(m, [](double x) { return std::log(x); });
}

Matrix herm_exp_normalized(const Matrix& a) {
  Eigh e = eigh(a);
  const double shift = e.values.maxCoeff();
  RealVector w(e.values.size());
  double z = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    w[k] = std::exp(e.values[k] - shift);
    z += w[k];
  }
  if (!std::isfinite(z) || z <= 0.0) {
    throw Error(ErrorCode::OverflowGuard, "exponent spread too large", z);
  }
  Matrix out = e.vectors * (w / z).asDiagonal() * e.vectors.adjoint();
  symmetrize(out);
  return out;
}

double trace_inner(const Matrix& a, const Matrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

double fro_norm(const Matrix& m) { return m.norm(); }

double trace_norm_herm(const Matrix& m) {
  return eigh(m).values.cwiseAbs().sum();
}

double trace_distance(const Matrix& a, const Matrix& b) {
  return 0.5 * trace_norm_herm(a - b);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

RealVector pinv_solve(const RealMatrix& gram, const RealVector& b,
                      double rel_eps) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(gram);
  const RealVector& w = es.eigenvalues();
  const double thresh = rel_eps * std::max(w.cwiseAbs().maxCoeff(), 1e-300);
  RealVector winv = RealVector::Zero(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k)
    if (std::abs(w[k]) > thresh) winv[k] = 1.0 / w[k];
  return es.eigenvectors() * winv.asDiagonal() *
         es.eigenvectors().transpose() * b;
}

Matrix project_span(std::span<const Matrix> basis, const Matrix& g,
                    double gram_eps) {
  const int n = static_cast<int>(basis.size());
  if (n == 0) return Matrix::Zero(g.rows(), g.cols());
  RealMatrix gram(n, n);
  RealVector rhs(n);
  for (int a = 0; a < n; ++a) {
    rhs[a] = trace_inner(basis[a], g);
    for (int b = a; b < n; ++b) {
      gram(a, b) = trace_inner(basis[a], basis[b]);
      gram(b, a) = gram(a, b);
    }
  }
  RealVector c = pinv_solve(gram, rhs, gram_eps);
  Matrix out = Matrix::Zero(g.rows(), g.cols());
  for (int a = 0; a < n; ++a) out += c[a] * basis[a];
  return out;
}

Matrix project_orth(std::span<const Matrix> basis, const Matrix& g,
                    double gram_eps) {
  return g - project_span(basis, g, gram_eps);
}

std::vector<Matrix> hermitian_basis(int d) {
  std::vector<Matrix> out;
  out.reserve(static_cast<size_t>(d) * d - 1);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < d; ++k) {
    for (int l = k + 1; l < d; ++l) {
      Matrix sym = Matrix::Zero(d, d);
      sym(k, l) = inv_sqrt2;
      sym(l, k) = inv_sqrt2;
      out.push_back(sym);
      Matrix asym = Matrix::Zero(d, d);
      asym(k, l) = Complex(0, -inv_sqrt2);
      asym(l, k) = Complex(0, inv_sqrt2);
      out.push_back(asym);
    }
  }
  for (int l = 1; l < d; ++l) {
    Matrix diag = Matrix::Zero(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int k = 0; k < l; ++k) diag(k, k) = norm;
    diag(l, l) = -static_cast<double>(l) * norm;
    out.push_back(diag);
  }
  return out;
}

Matrix simultaneous_eigenbasis(std::span<const Matrix> ops, double tol) {
  if (ops.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no operators given");
  }
  const Eigen::Index d = ops[0].rows();
  // A generic linear combination splits all common eigenspaces; retry with
  // new weights if some operator comes out non-diagonal.
  for (int attempt = 0; attempt < 8; ++attempt) {
    Matrix mix = Matrix::Zero(d, d);
    for (size_t k = 0; k < ops.size(); ++k) {
      const double scale = std::max(fro_norm(ops[k]), 1e-300);
      const double phi = 0.6180339887498949;
      double w = std::fmod((k + 1 + attempt * 7.0) * phi, 1.0) + 0.5;
      mix += (w / scale) * ops[k];
    }
    Eigh e = eigh(mix);
    bool ok = true;
    for (const Matrix& op : ops) {
      Matrix rot = e.vectors.adjoint() * op * e.vectors;
      Matrix off = rot;
      off.diagonal().setZero();
      if (off.cwiseAbs().maxCoeff() > tol * std::max(1.0, fro_norm(op))) {
        ok = false;
        break;
      }
    }
    if (ok) return e.vectors;
  }
  throw Error(ErrorCode::InvalidArgument,
              "operators do not admit a common eigenbasis");
}

bool all_finite(const Matrix& m) {
  return m.allFinite();
}

}  // namespace seaqt
