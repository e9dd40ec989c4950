#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "seaqt/state.hpp"

using namespace seaqt;

namespace {

Matrix random_hermitian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(n(rng), n(rng));
  return ((m + m.adjoint()) / 2.0).eval();
}

QuantumState random_full_rank_state(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(n(rng), n(rng));
  Matrix m = a * a.adjoint() + 1e-3 * Matrix::Identity(d, d);
  m /= m.trace();
  return validate_state(m);
}

// Independent index-summation partial trace.
Matrix partial_trace_oracle(const Matrix& m, int da, int db, int keep) {
  if (keep == 0) {
    Matrix out = Matrix::Zero(da, da);
    for (int i = 0; i < da; ++i)
      for (int j = 0; j < da; ++j)
        for (int k = 0; k < db; ++k) out(i, j) += m(i * db + k, j * db + k);
    return out;
  }
  Matrix out = Matrix::Zero(db, db);
  for (int i = 0; i < db; ++i)
    for (int j = 0; j < db; ++j)
      for (int k = 0; k < da; ++k) out(i, j) += m(k * db + i, k * db + j);
  return out;
}

double spectral_entropy(const Matrix& rho, double k_B) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  double s = 0.0;
  for (double p : es.eigenvalues()) {
    if (p > 0.0) s -= p * std::log(p);
  }
  return k_B * s;
}

}  // namespace

TEST_CASE("validate_state accepts a valid mixed state") {
  Matrix m(2, 2);
  m << 0.7, Complex(0.1, 0.05), Complex(0.1, -0.05), 0.3;
  const QuantumState st = validate_state(m);
  CHECK(st.dim == 2);
  CHECK(st.matrix.trace().real() == doctest::Approx(1.0));
}

TEST_CASE("validate_state rejects non-Hermitian input with the deviation") {
  Matrix m(2, 2);
  m << 0.7, Complex(0.1, 0.05), Complex(0.2, -0.05), 0.3;
  try {
    validate_state(m);
    FAIL("expected NotHermitian");
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::NotHermitian);
    CHECK(e.deviation == doctest::Approx(0.1));
  }
}

TEST_CASE("validate_state rejects trace deviation and negative eigenvalues") {
  Matrix m = Matrix::Identity(2, 2);
  try {
    validate_state(m);
    FAIL("expected TraceDeviation");
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::TraceDeviation);
    CHECK(e.deviation == doctest::Approx(1.0));
  }
  Matrix neg(2, 2);
  neg << 1.2, 0.0, 0.0, -0.2;
  try {
    validate_state(neg);
    FAIL("expected NegativeEigenvalue");
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::NegativeEigenvalue);
    CHECK(e.deviation == doctest::Approx(-0.2));
  }
}

TEST_CASE("entropy of closed-form spectra") {
  // s(p) = -k_B sum p ln p; values below from the defining formula.
  Matrix half = 0.5 * Matrix::Identity(2, 2);
  CHECK(entropy(validate_state(half)) == doctest::Approx(std::log(2.0)));

  Matrix pure = Matrix::Zero(2, 2);
  pure(0, 0) = 1.0;
  CHECK(entropy(validate_state(pure)) == doctest::Approx(0.0));

  Matrix p(3, 3);
  p.setZero();
  p.diagonal() << 0.5, 0.3, 0.2;
  const double expect =
      -(0.5 * std::log(0.5) + 0.3 * std::log(0.3) + 0.2 * std::log(0.2));
  CHECK(entropy(validate_state(p)) == doctest::Approx(expect));
  CHECK(entropy(validate_state(p), 1.380649e-23) ==
        doctest::Approx(1.380649e-23 * expect));
}

TEST_CASE("entropy matches the spectral oracle on random states") {
  std::mt19937_64 rng(11);
  for (int d = 2; d <= 6; ++d) {
    const QuantumState st = random_full_rank_state(d, rng);
    CHECK(entropy(st) ==
          doctest::Approx(spectral_entropy(st.matrix, 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("entropy operator reproduces the entropy and kills the kernel") {
  Matrix m = Matrix::Zero(3, 3);
  m.diagonal() << 0.75, 0.25, 0.0;
  const QuantumState st = validate_state(m);
  const Observable s_op = entropy_operator(st);
  CHECK(expectation(st, s_op) == doctest::Approx(entropy(st)));
  // Zero on the kernel: column of the unoccupied level vanishes.
  CHECK(s_op.matrix.col(2).norm() == doctest::Approx(0.0));
  CHECK(s_op.matrix.row(2).norm() == doctest::Approx(0.0));
  // On the support: -ln of the eigenvalue.
  CHECK(s_op.matrix(0, 0).real() == doctest::Approx(-std::log(0.75)));
  CHECK(s_op.matrix(1, 1).real() == doctest::Approx(-std::log(0.25)));
}

TEST_CASE("support projector rank and idempotence") {
  Matrix m = Matrix::Zero(3, 3);
  m.diagonal() << 0.6, 0.4, 0.0;
  const Observable b = support_projector(validate_state(m));
  CHECK(std::lround(b.matrix.trace().real()) == 2);
  CHECK((b.matrix * b.matrix - b.matrix).norm() == doctest::Approx(0.0));
  std::mt19937_64 rng(3);
  const QuantumState full = random_full_rank_state(4, rng);
  CHECK(std::lround(support_projector(full).matrix.trace().real()) == 4);
}

TEST_CASE("partial trace matches the index-summation oracle") {
  std::mt19937_64 rng(5);
  for (auto [da, db] : {std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 4}}) {
    const QuantumState st = random_full_rank_state(da * db, rng);
    for (int keep : {0, 1}) {
      const Matrix got = partial_trace(st.matrix, da, db, keep);
      const Matrix want = partial_trace_oracle(st.matrix, da, db, keep);
      CHECK((got - want).cwiseAbs().maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("tensor product and partial trace are mutually consistent") {
  std::mt19937_64 rng(7);
  const QuantumState a = random_full_rank_state(2, rng);
  const QuantumState b = random_full_rank_state(3, rng);
  const QuantumState ab = tensor_product(a, b);
  CHECK(ab.dim == 6);
  CHECK((partial_trace(ab.matrix, 2, 3, 0) - a.matrix).norm() < 1e-13);
  CHECK((partial_trace(ab.matrix, 2, 3, 1) - b.matrix).norm() < 1e-13);
}

TEST_CASE("mutual information: product zero, Bell pair 2 ln 2") {
  SystemModel model;
  model.subsystem_dims = {2, 2};
  model.H = Observable(Matrix::Zero(4, 4));

  std::mt19937_64 rng(9);
  const QuantumState prod = tensor_product(random_full_rank_state(2, rng),
                                           random_full_rank_state(2, rng));
  CHECK(mutual_information(prod, model) == doctest::Approx(0.0).epsilon(1e-12));

  Matrix bell = Matrix::Zero(4, 4);
  bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
  CHECK(mutual_information(validate_state(bell), model) ==
        doctest::Approx(2.0 * std::log(2.0)));
}

TEST_CASE("covariance of commuting diagonal observables") {
  Matrix rho = Matrix::Zero(2, 2);
  rho.diagonal() << 0.7, 0.3;
  Matrix z = Matrix::Zero(2, 2);
  z.diagonal() << 1.0, -1.0;
  const Observable sz{z};
  // <Z^2> - <Z>^2 = 1 - 0.4^2.
  CHECK(covariance(validate_state(rho), sz, sz) ==
        doctest::Approx(1.0 - 0.16));
}

TEST_CASE("effective subspace restricts and embeds consistently") {
  SystemModel model;
  model.subsystem_dims = {3};
  Matrix h = Matrix::Zero(3, 3);
  h.diagonal() << 0.0, 1.0, 2.0;
  model.H = Observable(h);

  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 0.75;
  m(1, 1) = 0.25;
  const EffectiveSubspace eff = effective_subspace(validate_state(m), model);
  CHECK(eff.dim() == 2);
  const Matrix& u = eff.support_basis;
  CHECK((u.adjoint() * u - Matrix::Identity(2, 2)).norm() < 1e-12);
  CHECK((u * eff.rho * u.adjoint() - m).norm() < 1e-12);
  CHECK((eff.H - u.adjoint() * h * u).norm() < 1e-12);
  // Round-trip: embed the restricted state back.
  CHECK((eff.embed(eff.rho) - m).norm() < 1e-12);
}

TEST_CASE("trace inner product agrees with the trace formula") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix a = random_hermitian(4, rng);
    const Matrix b = random_hermitian(4, rng);
    CHECK(trace_inner(a, b) ==
          doctest::Approx((a * b).trace().real()).epsilon(1e-12));
    CHECK(trace_inner(a, a) == doctest::Approx(a.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("hermitian basis is orthonormal, traceless, complete") {
  for (int d : {2, 3, 4}) {
    const std::vector<Matrix> basis = hermitian_basis(d);
    REQUIRE(static_cast<int>(basis.size()) == d * d - 1);
    for (size_t a = 0; a < basis.size(); ++a) {
      CHECK(std::abs(basis[a].trace()) < 1e-14);
      CHECK(hermiticity_deviation(basis[a]) < 1e-14);
      for (size_t b = a; b < basis.size(); ++b) {
        const double want = a == b ? 1.0 : 0.0;
        CHECK(trace_inner(basis[a], basis[b]) ==
              doctest::Approx(want).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("span projection agrees with a Gram-Schmidt oracle") {
  std::mt19937_64 rng(17);
  const int d = 3;
  std::vector<Matrix> raw = {Matrix::Identity(d, d), random_hermitian(d, rng),
                             random_hermitian(d, rng)};
  const Matrix g = random_hermitian(d, rng);

  // Oracle: classical Gram-Schmidt then explicit projector sum.
  std::vector<Matrix> ortho;
  for (Matrix v : raw) {
    for (const Matrix& u : ortho) v -= trace_inner(u, v) * u;
    const double nrm = std::sqrt(trace_inner(v, v));
    if (nrm > 1e-12) ortho.push_back(v / nrm);
  }
  Matrix want = Matrix::Zero(d, d);
  for (const Matrix& u : ortho) want += trace_inner(u, g) * u;

  const Matrix got = project_span(raw, g);
  CHECK((got - want).norm() < 1e-11);
  CHECK((project_orth(raw, g) - (g - want)).norm() < 1e-11);
  // Orthogonal complement really is orthogonal to every generator.
  for (const Matrix& v : raw) {
    CHECK(std::abs(trace_inner(v, project_orth(raw, g))) < 1e-11);
  }
  // A linearly dependent family must give the same projection.
  std::vector<Matrix> dependent = raw;
  dependent.push_back((2.0 * raw[1] - raw[2]).eval());
  CHECK((project_span(dependent, g) - want).norm() < 1e-10);
}

TEST_CASE("matrix functions: log and normalized exp invert each other") {
  std::mt19937_64 rng(19);
  const QuantumState st = random_full_rank_state(4, rng);
  const Matrix lg = herm_log(st.matrix);
  CHECK((herm_exp_normalized(lg) - st.matrix).norm() < 1e-12);
  // herm_exp_normalized survives large exponent shifts.
  const Matrix shifted = lg + 500.0 * Matrix::Identity(4, 4);
  CHECK((herm_exp_normalized(shifted) - st.matrix).norm() < 1e-12);
}

TEST_CASE("simultaneous eigenbasis diagonalizes commuting operators") {
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << 1.0, 1.0, 2.0;
  Matrix b = Matrix::Zero(3, 3);
  b(0, 1) = b(1, 0) = 1.0;  // commutes with a (degenerate block)
  const Matrix u = simultaneous_eigenbasis(std::vector<Matrix>{a, b});
  for (const Matrix& op : {a, b}) {
    Matrix rot = u.adjoint() * op * u;
    rot.diagonal().setZero();
    CHECK(rot.cwiseAbs().maxCoeff() < 1e-9);
  }
  Matrix c = Matrix::Zero(2, 2);
  c(0, 1) = c(1, 0) = 1.0;
  Matrix z = Matrix::Zero(2, 2);
  z.diagonal() << 1.0, -1.0;  // [c, z] != 0
  CHECK_THROWS_AS(simultaneous_eigenbasis(std::vector<Matrix>{c, z}), Error);
}

TEST_CASE("trace distance and trace norm on known spectra") {
  Matrix a = Matrix::Zero(2, 2);
  a.diagonal() << 1.0, 0.0;
  Matrix b = 0.5 * Matrix::Identity(2, 2);
  // Eigenvalues of a - b are +-1/2, so distance = 1/2.
  CHECK(trace_distance(a, b) == doctest::Approx(0.5));
  CHECK(trace_norm_herm(a - b) == doctest::Approx(1.0));
}

TEST_CASE("system model validation flags non-commuting invariants") {
  SystemModel model;
  model.subsystem_dims = {2};
  Matrix h = Matrix::Zero(2, 2);
  h.diagonal() << 0.0, 1.0;
  model.H = Observable(h);
  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  model.invariants.push_back(Observable(x));
  CHECK_THROWS_AS(model.validate(), Error);
  model.invariants.clear();
  CHECK_NOTHROW(model.validate());
}

TEST_CASE("noninteracting partition embeds local Hamiltonians") {
  SystemModel model;
  model.subsystem_dims = {2, 2};
  Matrix hl = Matrix::Zero(2, 2);
  hl.diagonal() << 0.0, 1.0;
  model.H_parts = {{Observable(hl), Observable(hl)}};
  model.H = Observable(kron(hl, Matrix::Identity(2, 2)) +
                       kron(Matrix::Identity(2, 2), hl));
  CHECK_NOTHROW(model.validate());
  CHECK((model.embedded_part(0) - kron(hl, Matrix::Identity(2, 2))).norm() <
        1e-14);
  CHECK((model.embedded_part(1) - kron(Matrix::Identity(2, 2), hl)).norm() <
        1e-14);
  // Mismatched declaration must be rejected.
  model.H = Observable(2.0 * model.H.matrix);
  CHECK_THROWS_AS(model.validate(), Error);
}
