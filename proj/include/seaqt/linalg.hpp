#pragma once

#include <functional>
#include <span>
#include <vector>

#include "seaqt/types.hpp"

namespace seaqt {

struct Eigh {
  RealVector values;  // ascending
  Matrix vectors;     // columns
};

// Hermitian eigendecomposition of (symmetrized) m.
Eigh eigh(const Matrix& m);

// In-place (m + m^dagger)/2; returns the pre-symmetrization deviation
// max |m_kl - conj(m_lk)|.
double symmetrize(Matrix& m);

double hermiticity_deviation(const Matrix& m);

// f applied to the spectrum of a Hermitian matrix.
Matrix herm_func(const Matrix& m, const std::function<double(double)>& f);

// log of a positive-definite Hermitian matrix.
Matrix herm_log(const Matrix& m);

// exp(a) / Tr exp(a) for Hermitian a, computed with a shifted exponent.
Matrix herm_exp_normalized(const Matrix& a);

// Re Tr(a b); exact inner product on the real space of Hermitian matrices.
double trace_inner(const Matrix& a, const Matrix& b);

double fro_norm(const Matrix& m);

// Sum of |eigenvalues| of a Hermitian matrix.
double trace_norm_herm(const Matrix& m);

// (1/2) || a - b ||_1 for Hermitian a, b.
double trace_distance(const Matrix& a, const Matrix& b);

Matrix kron(const Matrix& a, const Matrix& b);

// Orthogonal projection of g onto span{basis} under the trace inner product.
// The Gram matrix is pseudo-inverted with relative threshold gram_eps so that
// linearly dependent constraint sets are handled without branching.
Matrix project_span(std::span<const Matrix> basis, const Matrix& g,
                    double gram_eps = 1e-12);

Matrix project_orth(std::span<const Matrix> basis, const Matrix& g,
                    double gram_eps = 1e-12);

// Orthonormal traceless Hermitian basis of d x d matrices (generalized
// Gell-Mann matrices scaled to Tr(X_a X_b) = delta_ab); size d^2 - 1.
std::vector<Matrix> hermitian_basis(int d);

// Common eigenbasis of a family of mutually commuting Hermitian operators.
// Columns of the returned unitary diagonalize every operator within tol.
Matrix simultaneous_eigenbasis(std::span<const Matrix> ops, double tol = 1e-9);

// Minimum-norm solution of the symmetric system G x = b with eigenvalue
// threshold rel_eps * max|eig|.
RealVector pinv_solve(const RealMatrix& gram, const RealVector& b,
                      double rel_eps = 1e-12);

bool all_finite(const Matrix& m);

}  // namespace seaqt
