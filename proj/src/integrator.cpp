#include "seaqt/integrator.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace seaqt {

std::vector<double> IntegratorConfig::linspace(double t_final, int samples) {
  std::vector<double> out;
  out.reserve(samples);
  for (int k = 0; k < samples; ++k) {
    out.push_back(t_final * static_cast<double>(k) / (samples - 1));
  }
  out.front() = 0.0;
  return out;
}

namespace {

// Dormand-Prince 4(5) coefficients.
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384,     0.0,  500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695,
                           393.0 / 640,       -92097.0 / 339200,
                           187.0 / 2100,      1.0 / 40};

struct StepResult {
  Matrix y;
  double err_norm;   // scaled, accept when <= 1
  double err_abs;    // max raw entry of the embedded error estimate
};

SampleRecord make_record(const SystemModel& model, const DynamicsSpec& spec,
                         const QuantumState& rho, double t,
                         const IntegratorConfig& config, double err_abs,
                         double sym_dev) {
  SampleRecord rec;
  rec.t = t;
  rec.trace = rho.matrix.trace().real();
  rec.e = expectation(rho, model.H);
  for (const Observable& g : model.invariants) rec.g.push_back(expectation(rho, g));
  if (model.noninteracting()) {
    rec.subsystem_energies.push_back(trace_inner(model.embedded_part(0), rho.matrix));
    rec.subsystem_energies.push_back(trace_inner(model.embedded_part(1), rho.matrix));
  }
  rec.entropy = entropy(rho, model.constants.k_B);
  Eigh e = eigh(rho.matrix);
  rec.lambda_min = e.values.minCoeff();
  rec.lambda_max = e.values.maxCoeff();
  const double thresh = config.eps_ker * std::max(rec.lambda_max, 0.0);
  rec.rank = 0;
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    if (e.values[k] > thresh) ++rec.rank;
  }
  MotionTerms terms = motion(model, spec, rho);
  rec.dnorm = fro_norm(terms.dissipative_term);
  rec.mutual_information = model.bipartite()
                               ? mutual_information(rho, model)
                               : std::nan("");
  rec.err_estimate = err_abs;
  rec.symmetry_deviation = sym_dev;
  return rec;
}

}  // namespace

Trajectory propagate(const SystemModel& model, const DynamicsSpec& spec,
                     const QuantumState& rho0, const IntegratorConfig& config) {
  spec.validate(model);
  const std::vector<double>& samples = config.sample_times;
  if (samples.empty() || std::abs(samples.front()) > 1e-15) {
    throw Error(ErrorCode::InvalidArgument, "sample_times must start at 0");
  }
  for (size_t k = 1; k < samples.size(); ++k) {
    const double d0 = samples[1] - samples[0];
    const double dk = samples[k] - samples[k - 1];
    if (dk * d0 <= 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "sample_times must be strictly monotone");
    }
  }

  auto rhs = [&](const Matrix& y) {
    MotionTerms terms = motion(model, spec, QuantumState::unchecked(y));
    return Matrix(terms.hamiltonian_term + terms.dissipative_term);
  };

  Trajectory traj;
  Matrix y = rho0.matrix;
  double t = 0.0;

  double err_abs_window = 0.0;
  double sym_dev_window = 0.0;
  auto record = [&](double at) {
    QuantumState snap = QuantumState::unchecked(y);
    traj.times.push_back(at);
    traj.records.push_back(make_record(model, spec, snap, at, config,
                                       err_abs_window, sym_dev_window));
    traj.states.push_back(std::move(snap));
    err_abs_window = 0.0;
    sym_dev_window = 0.0;
  };

  record(0.0);
  if (samples.size() == 1) return traj;

  const double dir = samples.back() > 0.0 ? 1.0 : -1.0;
  const double span = std::abs(samples.back());
  double h = std::min(std::abs(config.dt_init), config.dt_max);

  auto attempt = [&](double step) -> StepResult {
    Matrix k[7];
    k[0] = rhs(y);
    for (int stage = 1; stage < 7; ++stage) {
      Matrix arg = y;
      for (int j = 0; j < stage; ++j) {
        if (kA[stage][j] != 0.0) arg += (dir * step * kA[stage][j]) * k[j];
      }
      k[stage] = rhs(arg);
    }
    Matrix y5 = y;
    Matrix err = Matrix::Zero(y.rows(), y.cols());
    for (int j = 0; j < 7; ++j) {
      if (kB5[j] != 0.0) y5 += (dir * step * kB5[j]) * k[j];
      const double db = kB5[j] - kB4[j];
      if (db != 0.0) err += (dir * step * db) * k[j];
    }
    if (!all_finite(y5) || !all_finite(err)) {
      throw Error(ErrorCode::NonFinite, "non-finite value during integration");
    }
    double norm = 0.0;
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      for (Eigen::Index j = 0; j < y.cols(); ++j) {
        const double scale =
            config.atol +
            config.rtol * std::max(std::abs(y(i, j)), std::abs(y5(i, j)));
        norm = std::max(norm, std::abs(err(i, j)) / scale);
      }
    }
    return {std::move(y5), norm, err.cwiseAbs().maxCoeff()};
  };

  for (size_t target_idx = 1; target_idx < samples.size(); ++target_idx) {
    const double target = samples[target_idx];
    while (dir * (target - t) > 1e-14 * std::max(span, 1.0)) {
      double step = std::min(h, std::abs(target - t));
      if (step < 1e-14 * std::max(span, 1.0)) break;
      StepResult res = attempt(step);

      bool accept = res.err_norm <= 1.0;
      if (accept) {
        // Positivity guard: the entropy gradient diverges at the boundary of
        // the state domain, so shrink instead of failing.
        const double min_eig = eigh(res.y).values.minCoeff();
        if (min_eig < -10.0 * config.atol) accept = false;
      }
      if (accept) {
        t += dir * step;
        y = std::move(res.y);
        sym_dev_window = std::max(sym_dev_window, symmetrize(y));
        if (config.mode == RepairMode::strict) {
          y /= y.trace().real();
        }
        err_abs_window = std::max(err_abs_window, res.err_abs);
        const double grow =
            res.err_norm > 0.0
                ? std::clamp(0.9 * std::pow(res.err_norm, -0.2), 0.2, 5.0)
                : 5.0;
        h = std::min(step * grow, config.dt_max);
      } else {
        const double shrink =
            res.err_norm > 1.0
                ? std::clamp(0.9 * std::pow(res.err_norm, -0.2), 0.1, 0.9)
                : 0.5;
        h = step * shrink;
      }
      if (h < 1e-14 * std::max(span, 1.0)) {
        traj.complete = false;
        traj.diagnosis =
            "StepUnderflow at t=" + std::to_string(t) +
            " (step size below 1e-14 of span; state at the domain boundary)";
        return traj;
      }
    }
    record(target);
  }
  return traj;
}

void write_csv(const Trajectory& traj, std::ostream& out) {
  const size_t n_g = traj.records.empty() ? 0 : traj.records.front().g.size();
  out << "t,entropy,trace,e";
  for (size_t i = 0; i < n_g; ++i) out << ",g_" << i;
  out << ",lambda_min,lambda_max,rank,dnorm,mutual_information\n";
  char buf[32];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const SampleRecord& r : traj.records) {
    out << fmt(r.t) << ',' << fmt(r.entropy) << ',' << fmt(r.trace) << ','
        << fmt(r.e);
    for (double g : r.g) out << ',' << fmt(g);
    out << ',' << fmt(r.lambda_min) << ',' << fmt(r.lambda_max) << ','
        << r.rank << ',' << fmt(r.dnorm) << ',' << fmt(r.mutual_information)
        << '\n';
  }
}

}  // namespace seaqt
