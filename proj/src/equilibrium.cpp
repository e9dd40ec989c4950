#include "seaqt/equilibrium.hpp"

#include <cmath>

namespace seaqt {

namespace {

Matrix exp_family_state(std::span<const Matrix> ops,
                        std::span<const double> theta) {
  Matrix a = Matrix::Zero(ops[0].rows(), ops[0].cols());
  for (size_t k = 0; k < ops.size(); ++k) a += theta[k] * ops[k];
  return herm_exp_normalized(a);
}

std::vector<double> residuals_at(const Matrix& rho,
                                 std::span<const Matrix> ops,
                                 std::span<const double> targets) {
  std::vector<double> r(ops.size());
  for (size_t k = 0; k < ops.size(); ++k) {
    r[k] = (rho * ops[k]).trace().real() - targets[k];
  }
  return r;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Bisection on the single-constraint exponential family; Tr(rho(theta) O) is
// nondecreasing in theta.
double bisect_single(const Matrix& op, double target) {
  auto mean = [&](double theta) {
    Matrix rho = herm_exp_normalized(theta * op);
    return (rho * op).trace().real();
  };
  double lo = -1.0, hi = 1.0;
  while (mean(lo) > target) {
    lo *= 2.0;
    if (lo < -1e5) throw Error(ErrorCode::Infeasible, "target below reachable range");
  }
  while (mean(hi) < target) {
    hi *= 2.0;
    if (hi > 1e5) throw Error(ErrorCode::Infeasible, "target above reachable range");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mean(mid) < target) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

MaxEntSolution max_entropy_state(std::span<const Matrix> ops,
                                 std::span<const double> targets,
                                 double k_B) {
  if (ops.size() != targets.size() || ops.empty()) {
    throw Error(ErrorCode::InvalidArgument, "ops/targets size mismatch");
  }
  const int m = static_cast<int>(ops.size());

  // Per-operator feasibility: target strictly inside the spectral range,
  // except for operators proportional to the identity.
  for (int k = 0; k < m; ++k) {
    const RealVector w = eigh(ops[k]).values;
    const double lo = w.minCoeff(), hi = w.maxCoeff();
    const double spread = hi - lo;
    const double scale = std::max({std::abs(lo), std::abs(hi), 1.0});
    if (spread <= 1e-12 * scale) {
      if (std::abs(targets[k] - 0.5 * (lo + hi)) > 1e-8 * scale) {
        throw Error(ErrorCode::Infeasible,
                    "target incompatible with a degenerate constraint operator",
                    targets[k] - 0.5 * (lo + hi));
      }
      continue;
    }
    if (targets[k] < lo + 1e-12 * spread || targets[k] > hi - 1e-12 * spread) {
      throw Error(ErrorCode::Infeasible, "target outside the spectral range",
                  targets[k]);
    }
  }

  std::vector<double> theta(m, 0.0);
  std::vector<double> tol(m);
  for (int k = 0; k < m; ++k) tol[k] = 1e-13 * std::max(1.0, fro_norm(ops[k]));

  Matrix rho = exp_family_state(ops, theta);
  std::vector<double> res = residuals_at(rho, ops, targets);

  auto converged = [&](const std::vector<double>& r) {
    for (int k = 0; k < m; ++k)
      if (std::abs(r[k]) > tol[k]) return false;
    return true;
  };

  bool done = converged(res);
  for (int iter = 0; iter < 200 && !done; ++iter) {
    // Exact Jacobian: d<O_k>/d theta_l is the covariance of (O_k, O_l).
    RealMatrix jac(m, m);
    QuantumState qs = QuantumState::unchecked(rho);
    for (int k = 0; k < m; ++k) {
      for (int l = k; l < m; ++l) {
        jac(k, l) = covariance(qs, Observable(ops[k]), Observable(ops[l]));
        jac(l, k) = jac(k, l);
      }
    }
    RealVector rhs(m);
    for (int k = 0; k < m; ++k) rhs[k] = -res[k];
    RealVector step = pinv_solve(jac, rhs, 1e-13);

    double alpha = 1.0;
    const double old_norm = inf_norm(res);
    bool accepted = false;
    for (int half = 0; half < 40; ++half) {
      std::vector<double> cand(m);
      for (int k = 0; k < m; ++k) cand[k] = theta[k] + alpha * step[k];
      Matrix rho_cand;
      try {
        rho_cand = exp_family_state(ops, cand);
      } catch (const Error&) {
        alpha *= 0.5;
        continue;
      }
      std::vector<double> res_cand = residuals_at(rho_cand, ops, targets);
      if (inf_norm(res_cand) < old_norm || converged(res_cand)) {
        theta = std::move(cand);
        rho = std::move(rho_cand);
        res = std::move(res_cand);
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    double theta_norm = inf_norm(theta);
    if (theta_norm > 1e5) {
      throw Error(ErrorCode::Infeasible,
                  "multipliers diverge; targets at or outside the feasible set",
                  theta_norm);
    }
    if (!accepted) {
      if (m == 1) {
        theta[0] = bisect_single(ops[0], targets[0]);
        rho = exp_family_state(ops, theta);
        res = residuals_at(rho, ops, targets);
        done = true;
        break;
      }
      throw Error(ErrorCode::NoConvergence, "Newton stalled on Gibbs solve",
                  inf_norm(res));
    }
    done = converged(res);
  }
  if (!done && !converged(res)) {
    if (m == 1) {
      theta[0] = bisect_single(ops[0], targets[0]);
      rho = exp_family_state(ops, theta);
      res = residuals_at(rho, ops, targets);
    } else {
      throw Error(ErrorCode::NoConvergence, "Gibbs solve did not converge",
                  inf_norm(res));
    }
  }

  MaxEntSolution sol;
  sol.multipliers = theta;
  sol.state = validate_state(rho, StateTol{}.scaled(100.0));
  sol.s_max = entropy(sol.state, k_B);
  sol.residuals = res;
  return sol;
}

QuantumState gibbs_density(const SystemModel& model, double beta,
                           std::span<const double> nu) {
  if (nu.size() > model.invariants.size()) {
    throw Error(ErrorCode::DimensionMismatch, "more nu values than invariants");
  }
  Matrix a = -beta * model.H.matrix;
  for (size_t i = 0; i < nu.size(); ++i) a += nu[i] * model.invariants[i].matrix;
  return QuantumState::unchecked(herm_exp_normalized(a));
}

GibbsSolution solve_gibbs(const SystemModel& model, double e_target,
                          std::span<const double> g_targets) {
  if (g_targets.size() != model.invariants.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "one target per declared invariant required");
  }
  std::vector<Matrix> ops;
  std::vector<double> targets;
  ops.push_back(model.H.matrix);
  targets.push_back(e_target);
  for (size_t i = 0; i < g_targets.size(); ++i) {
    ops.push_back(model.invariants[i].matrix);
    targets.push_back(g_targets[i]);
  }
  MaxEntSolution me = max_entropy_state(ops, targets, model.constants.k_B);
  GibbsSolution sol;
  sol.beta = -me.multipliers[0];
  sol.nu.assign(me.multipliers.begin() + 1, me.multipliers.end());
  sol.state = std::move(me.state);
  sol.s_max = me.s_max;
  sol.residuals = std::move(me.residuals);
  return sol;
}

QuantumState nd_state(const SystemModel& model, const Observable& B,
                      double e_target, std::span<const double> g_targets) {
  const Matrix& b = B.matrix;
  const double idem_dev = fro_norm(b * b - b);
  if (idem_dev > 1e-10) {
    throw Error(ErrorCode::NotIdempotent, "B is not idempotent", idem_dev);
  }
  auto comm_dev = [&](const Matrix& x) { return fro_norm(b * x - x * b); };
  double dev = comm_dev(model.H.matrix);
  for (const Observable& g : model.invariants) dev = std::max(dev, comm_dev(g.matrix));
  if (dev > 1e-10 * std::max(fro_norm(model.H.matrix), 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "nd_state requires B commuting with H and all G_i", dev);
  }

  const int rank = static_cast<int>(std::lround(b.trace().real()));
  if (rank == model.dim()) {
    return solve_gibbs(model, e_target, g_targets).state;
  }

  // Support basis of B.
  Eigh eb = eigh(b);
  Matrix u(model.dim(), rank);
  int col = 0;
  for (Eigen::Index k = 0; k < eb.values.size(); ++k) {
    if (eb.values[k] > 0.5) u.col(col++) = eb.vectors.col(k);
  }
  if (col != rank) {
    throw Error(ErrorCode::NotIdempotent, "B has eigenvalues away from {0,1}");
  }

  std::vector<Matrix> ops;
  std::vector<double> targets;
  Matrix h_r = u.adjoint() * model.H.matrix * u;
  symmetrize(h_r);
  ops.push_back(-h_r);
  targets.push_back(-e_target);
  for (size_t i = 0; i < g_targets.size(); ++i) {
    Matrix g_r = u.adjoint() * model.invariants[i].matrix * u;
    symmetrize(g_r);
    ops.push_back(std::move(g_r));
    targets.push_back(g_targets[i]);
  }

  if (rank == 1) {
    // One occupied level: the state is B itself, provided the targets match.
    const double scale = std::max(fro_norm(model.H.matrix), 1.0);
    if (std::abs(h_r(0, 0).real() - e_target) > 1e-8 * scale) {
      throw Error(ErrorCode::Infeasible,
                  "energy target incompatible with rank-1 B",
                  h_r(0, 0).real() - e_target);
    }
    for (size_t i = 0; i < g_targets.size(); ++i) {
      if (std::abs(ops[i + 1](0, 0).real() - g_targets[i]) > 1e-8 * scale) {
        throw Error(ErrorCode::Infeasible,
                    "invariant target incompatible with rank-1 B");
      }
    }
    Matrix proj = b;
    symmetrize(proj);
    return QuantumState::unchecked(std::move(proj));
  }

  MaxEntSolution me = max_entropy_state(ops, targets, model.constants.k_B);
  Matrix full = u * me.state.matrix * u.adjoint();
  symmetrize(full);
  return QuantumState::unchecked(std::move(full));
}

}  // namespace seaqt
