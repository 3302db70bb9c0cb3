#include "qflag/dynamics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace qflag {

namespace {

Eigen::MatrixXcd reconstruct(const Eigen::VectorXd& v, const GellMannBasis& basis) {
  const int N = basis.levels();
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(N, N) / double(N);
  for (int a = 0; a < basis.dim(); ++a) rho += v(a) * basis.matrix(a);
  return rho;
}

Eigen::VectorXd sorted_spectrum(const Eigen::VectorXd& v, const GellMannBasis& basis) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(reconstruct(v, basis),
                                                         Eigen::EigenvaluesOnly);
  Eigen::VectorXd w = solver.eigenvalues();
  std::sort(w.data(), w.data() + w.size(), std::greater<double>());
  return w;
}

}  // namespace

Plant::Plant(int N, const Eigen::VectorXd& energies, const Eigen::VectorXd& hB_coeffs)
    : basis_(std::make_shared<const GellMannBasis>(GellMannBasis::build(N))) {
  if (energies.size() != N) {
    throw ConfigError("Plant: expected " + std::to_string(N) + " energy levels");
  }
  const HamiltonianSpec hA = HamiltonianSpec::diagonal(energies);
  energies_ = energies;

  if (hB_coeffs.size() != basis_->dim()) {
    throw ConfigError("Plant: H_B coefficient vector must have n = N^2 - 1 entries");
  }
  for (int a = 0; a < basis_->dim(); ++a) {
    if (basis_->label(a).kind == LabelKind::Diag && std::abs(hB_coeffs(a)) > 1e-12) {
      throw ConfigError("Plant: H_B must be off-diagonal (nonzero coefficient at " +
                        to_string(basis_->label(a)) + ")");
    }
  }
  hB_ = hB_coeffs;

  A_ = adjoint_matrix(hA.to_coeffs(*basis_), *basis_);
  B_ = adjoint_matrix(hB_, *basis_);

  nearest_neighbor_ = true;
  for (int j = 1; j < N; ++j) {
    const double re = hB_(basis_->position(LabelKind::OffRe, j, j + 1));
    const double im = hB_(basis_->position(LabelKind::OffIm, j, j + 1));
    if (std::hypot(re, im) == 0.0) nearest_neighbor_ = false;
  }
}

Regularity Plant::regularity(double tol) const { return is_strongly_regular(energies_, tol); }

CoherenceVector reference_orbit(const CoherenceVector& rho_d0, const Plant& plant, double t) {
  if (rho_d0.N != plant.levels()) {
    throw DimensionMismatch("reference_orbit: dimension mismatch");
  }
  CoherenceVector out;
  out.N = rho_d0.N;
  out.varrho = (t * plant.A().mat).exp() * rho_d0.varrho;
  return out;
}

CoherenceVector reference_orbit(const DensityOperator& rho_d0, const Plant& plant, double t) {
  return reference_orbit(to_coherence(rho_d0, plant.basis()), plant, t);
}

double feedback_u(const CoherenceVector& v_d, const CoherenceVector& v,
                  const AdjointGenerator& B) {
  if (v_d.N != v.N || v.varrho.size() != B.mat.rows()) {
    throw DimensionMismatch("feedback_u: dimension mismatch");
  }
  return v_d.varrho.dot(B.mat * v.varrho);
}

double lyapunov_V(const CoherenceVector& v_d, const CoherenceVector& v) {
  if (v_d.N != v.N) {
    throw DimensionMismatch("lyapunov_V: dimension mismatch");
  }
  return v.varrho.squaredNorm() - v_d.varrho.dot(v.varrho);
}

double TrajectoryRecord::max_abs_control() const {
  double m = 0.0;
  for (double u : control) m = std::max(m, std::abs(u));
  return m;
}

TrajectoryRecord simulate_closed_loop(const Plant& plant, const DensityOperator& rho_d0,
                                      const DensityOperator& rho0,
                                      const SimulateOptions& options) {
  if (options.dt <= 0.0 || options.T < options.dt) {
    throw ConfigError("simulate_closed_loop: need dt > 0 and T >= dt");
  }
  if (options.record_stride < 1) {
    throw ConfigError("simulate_closed_loop: record_stride must be >= 1");
  }
  const GellMannBasis& basis = plant.basis();
  const Eigen::MatrixXd& A = plant.A().mat;
  const Eigen::MatrixXd& B = plant.B().mat;
  const double normA = A.norm();
  const double normB = B.norm();
  const double dt = options.dt;

  TrajectoryRecord rec;
  rec.N = plant.levels();
  rec.strongly_regular = plant.regularity() == Regularity::StronglyRegular;

  Eigen::VectorXd v = to_coherence(rho0, basis).varrho;
  Eigen::VectorXd vd = to_coherence(rho_d0, basis).varrho;
  const double norm0 = v.norm();
  const Eigen::VectorXd spectrum0 = sorted_spectrum(v, basis);

  const Eigen::MatrixXd step_drift = (dt * A).exp();
  // Reference propagators at the RK4 stage offsets.
  const Eigen::MatrixXd half_drift = (0.5 * dt * A).exp();

  const auto feedback = [&](const Eigen::VectorXd& ref, const Eigen::VectorXd& state) {
    return options.feedback_enabled ? ref.dot(B * state) : 0.0;
  };

  const long steps = std::lround(options.T / dt);
  long consecutive_below = 0;

  const auto record_sample = [&](double t, double u, double V) {
    rec.times.push_back(t);
    rec.states.push_back(v);
    rec.reference.push_back(vd);
    rec.control.push_back(u);
    rec.lyapunov.push_back(V);
    rec.eig_drift.push_back(
        (sorted_spectrum(v, basis) - spectrum0).cwiseAbs().maxCoeff());
  };

  double V_prev = 0.0;
  double u_prev = 0.0;
  double V0 = 0.0;
  for (long k = 0; k <= steps; ++k) {
    const double t = k * dt;
    const double u = feedback(vd, v);
    const double V = v.squaredNorm() - vd.dot(v);

    if (k == 0) {
      V0 = V;
    } else {
      // u_prev is the control held over the step that produced this state.
      const double dV = V - V_prev;
      rec.max_V_increase = std::max(rec.max_V_increase, dV);
      rec.max_lyapunov_defect =
          std::max(rec.max_lyapunov_defect, std::abs(dV / dt + u_prev * u_prev));
    }
    u_prev = u;
    V_prev = V;
    rec.max_abs_control_all = std::max(rec.max_abs_control_all, std::abs(u));
    rec.max_V_deviation = std::max(rec.max_V_deviation, std::abs(V - V0));

    rec.max_norm_drift = std::max(rec.max_norm_drift, std::abs(v.norm() - norm0));

    const bool last = (k == steps);
    if (k % options.record_stride == 0 || last) record_sample(t, u, V);

    if (V < options.convergence_V) {
      if (++consecutive_below >= options.convergence_run_length && !rec.converged_time) {
        rec.converged_time = t;
        if (options.stop_on_convergence) {
          if (!(k % options.record_stride == 0 || last)) record_sample(t, u, V);
          break;
        }
      }
    } else {
      consecutive_below = 0;
    }
    if (last) break;

    if (dt * (normA + std::abs(u) * normB) > 1.0) {
      throw StepError("simulate_closed_loop: dt * |A + u B| > 1 at t = " + std::to_string(t));
    }

    if (options.integrator == SimulateOptions::Integrator::LieExponential) {
      v = ((dt * (A + u * B)).exp() * v).eval();
    } else {
      // RK4 on the closed loop with continuously re-evaluated feedback and a
      // norm re-projection after the step.
      const auto rhs = [&](const Eigen::VectorXd& ref, const Eigen::VectorXd& state) {
        return ((A + feedback(ref, state) * B) * state).eval();
      };
      const Eigen::VectorXd vd_half = half_drift * vd;
      const Eigen::VectorXd vd_full = step_drift * vd;
      const Eigen::VectorXd k1 = rhs(vd, v);
      const Eigen::VectorXd k2 = rhs(vd_half, v + 0.5 * dt * k1);
      const Eigen::VectorXd k3 = rhs(vd_half, v + 0.5 * dt * k2);
      const Eigen::VectorXd k4 = rhs(vd_full, v + dt * k3);
      v += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (v.norm() > 0.0) v *= norm0 / v.norm();
    }
    vd = (step_drift * vd).eval();
  }
  return rec;
}

TrajectoryRecord rotating_frame(const TrajectoryRecord& traj, const Plant& plant) {
  TrajectoryRecord out = traj;
  const Eigen::MatrixXd& A = plant.A().mat;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const Eigen::MatrixXd undrift = (-traj.times[i] * A).exp();
    out.states[i] = undrift * traj.states[i];
    out.reference[i] = undrift * traj.reference[i];
    out.lyapunov[i] =
        out.states[i].squaredNorm() - out.reference[i].dot(out.states[i]);
  }
  return out;
}

void write_trajectory_csv(const TrajectoryRecord& traj, std::ostream& out) {
  const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
  out << "t,u,V,eig_drift";
  for (int a = 0; a < n; ++a) out << ",varrho_" << a;
  for (int a = 0; a < n; ++a) out << ",ref_" << a;
  out << "\n";
  char buf[32];
  const auto put = [&](double x) {
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out << buf;
  };
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    put(traj.times[i]);
    out << ',';
    put(traj.control[i]);
    out << ',';
    put(traj.lyapunov[i]);
    out << ',';
    put(traj.eig_drift[i]);
    for (int a = 0; a < n; ++a) {
      out << ',';
      put(traj.states[i](a));
    }
    for (int a = 0; a < n; ++a) {
      out << ',';
      put(traj.reference[i](a));
    }
    out << "\n";
  }
}

}  // namespace qflag
