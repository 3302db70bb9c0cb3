#ifndef QFLAG_DYNAMICS_HPP
#define QFLAG_DYNAMICS_HPP

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include "qflag/basis.hpp"
#include "qflag/state.hpp"

namespace qflag {

/// Bilinear plant varrho' = (A + u B) varrho with diagonal drift Hamiltonian
/// H_A (given by its energy levels) and off-diagonal control Hamiltonian H_B
/// (given by basis coefficients on OffRe/OffIm labels only).
class Plant {
public:
  Plant(int N, const Eigen::VectorXd& energies, const Eigen::VectorXd& hB_coeffs);

  const GellMannBasis& basis() const { return *basis_; }
  std::shared_ptr<const GellMannBasis> basis_ptr() const { return basis_; }
  const AdjointGenerator& A() const { return A_; }
  const AdjointGenerator& B() const { return B_; }
  const Eigen::VectorXd& energies() const { return energies_; }
  const Eigen::VectorXd& hB_coeffs() const { return hB_; }
  int levels() const { return basis_->levels(); }
  int dim() const { return basis_->dim(); }

  Regularity regularity(double tol = 1e-9) const;

  /// Theorem hypothesis flag: every adjacent transition (j, j+1) is coupled
  /// by H_B.
  bool nearest_neighbor_coupling() const { return nearest_neighbor_; }

private:
  std::shared_ptr<const GellMannBasis> basis_;
  Eigen::VectorXd energies_;
  Eigen::VectorXd hB_;
  AdjointGenerator A_;
  AdjointGenerator B_;
  bool nearest_neighbor_ = false;
};

/// Reference state at time t: varrho_d(t) = exp(t A) varrho_d(0), computed by
/// matrix exponential rather than stepping. The reference drift equals the
/// plant drift by construction.
CoherenceVector reference_orbit(const CoherenceVector& rho_d0, const Plant& plant, double t);
CoherenceVector reference_orbit(const DensityOperator& rho_d0, const Plant& plant, double t);

/// Feedback law u = <v_d, B v>.
double feedback_u(const CoherenceVector& v_d, const CoherenceVector& v,
                  const AdjointGenerator& B);

/// Tracking functional V = |v|^2 - <v_d, v>.
double lyapunov_V(const CoherenceVector& v_d, const CoherenceVector& v);

/// Sampled closed-loop run. Samples are taken every record_stride steps plus
/// the final state; the *_max diagnostics are accumulated over every step
/// regardless of stride.
struct TrajectoryRecord {
  int N = 0;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> reference;
  std::vector<double> control;
  std::vector<double> lyapunov;
  std::vector<double> eig_drift;  // max |sorted spec(rho(t)) - sorted spec(rho(0))|

  double max_V_increase = 0.0;        // per-step Lyapunov monotonicity defect
  double max_lyapunov_defect = 0.0;   // max |dV/dt + u^2| over steps
  double max_norm_drift = 0.0;        // | ||v(t)|| - ||v(0)|| |
  double max_abs_control_all = 0.0;   // over every step, not just samples
  double max_V_deviation = 0.0;       // max |V(t) - V(0)| over every step
  std::optional<double> converged_time;
  bool strongly_regular = true;

  double final_V() const { return lyapunov.back(); }
  double max_abs_control() const;
};

struct SimulateOptions {
  double dt = 1e-3;
  double T = 20.0;
  int record_stride = 1;
  bool feedback_enabled = true;
  double convergence_V = 1e-6;
  int convergence_run_length = 100;
  bool stop_on_convergence = false;
  enum class Integrator { LieExponential, RungeKutta4 };
  Integrator integrator = Integrator::LieExponential;
};

/// Integrates the closed loop with a Lie-group stepper: u is held over each
/// step and the state advances by exp(dt (A + u_k B)), so norm and spectrum
/// are preserved to expm accuracy. The reference advances by exp(dt A).
/// A classical RK4 stepper with norm re-projection is available for
/// cross-checks. Throws StepError when dt * |A + u B| > 1.
TrajectoryRecord simulate_closed_loop(const Plant& plant, const DensityOperator& rho_d0,
                                      const DensityOperator& rho0, const SimulateOptions& options);

/// Frame rotating with the drift: varrho_hat(t) = exp(-t A) varrho(t). The
/// reference becomes a fixed point and V is unchanged sample by sample.
TrajectoryRecord rotating_frame(const TrajectoryRecord& traj, const Plant& plant);

/// CSV columns: t,u,V,eig_drift,varrho_0..varrho_{n-1},ref_0..ref_{n-1}.
void write_trajectory_csv(const TrajectoryRecord& traj, std::ostream& out);

}  // namespace qflag

#endif  // QFLAG_DYNAMICS_HPP
