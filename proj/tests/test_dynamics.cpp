#include "qflag/dynamics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"

using namespace qflag;

namespace {

Plant plant2() {
  const GellMannBasis basis = build_basis(2);
  Eigen::VectorXd hB = Eigen::VectorXd::Zero(3);
  hB(basis.position(LabelKind::OffRe, 1, 2)) = 0.8;
  return Plant(2, Eigen::Vector2d(-0.5, 0.5), hB);
}

Plant plant3_full() {
  const GellMannBasis basis = build_basis(3);
  Eigen::VectorXd hB = Eigen::VectorXd::Zero(8);
  hB(basis.position(LabelKind::OffRe, 1, 2)) = 0.8;
  hB(basis.position(LabelKind::OffRe, 1, 3)) = 0.6;
  hB(basis.position(LabelKind::OffRe, 2, 3)) = 0.7;
  return Plant(3, Eigen::Vector3d(-0.7, 0.1, 0.6), hB);
}

DensityOperator diag_density(const std::vector<double>& w) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(w.size(), w.size());
  for (std::size_t i = 0; i < w.size(); ++i) rho(i, i) = w[i];
  return DensityOperator::from_matrix(rho);
}

DensityOperator blocked23_state() {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(3, 3);
  rho(1, 1) = rho(1, 2) = rho(2, 1) = rho(2, 2) = 0.5;
  return DensityOperator::from_matrix(rho);
}

DensityOperator pure_state(const Eigen::VectorXcd& psi) {
  const Eigen::VectorXcd n = psi / psi.norm();
  return DensityOperator::from_matrix(n * n.adjoint());
}

}  // namespace

TEST_CASE("plant validation and drift kernel") {
  const Plant plant = plant3_full();
  CHECK(plant.regularity() == Regularity::StronglyRegular);
  CHECK(plant.nearest_neighbor_coupling());

  // A annihilates every Cartan direction; dim ker A = N - 1.
  const Eigen::MatrixXd& A = plant.A().mat;
  for (int a = 0; a < plant.dim(); ++a) {
    if (plant.basis().label(a).kind == LabelKind::Diag) {
      CHECK(A.col(a).cwiseAbs().maxCoeff() == 0.0);
      CHECK(A.row(a).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  CHECK(lu.rank() == plant.dim() - (plant.levels() - 1));

  // H_B with a diagonal component is rejected.
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(8);
  bad(plant.basis().position(LabelKind::Diag, 1)) = 0.3;
  CHECK_THROWS_AS(Plant(3, Eigen::Vector3d(-0.7, 0.1, 0.6), bad), ConfigError);

  // Missing (2,3) coupling clears the nearest-neighbor flag.
  Eigen::VectorXd gap = Eigen::VectorXd::Zero(8);
  gap(plant.basis().position(LabelKind::OffRe, 1, 2)) = 0.8;
  gap(plant.basis().position(LabelKind::OffRe, 1, 3)) = 0.6;
  CHECK_FALSE(Plant(3, Eigen::Vector3d(-0.7, 0.1, 0.6), gap).nearest_neighbor_coupling());
}

TEST_CASE("reference orbit: fixed points and closed-form rotation") {
  const Plant plant = plant2();
  const GellMannBasis& basis = plant.basis();

  // Diagonal references are fixed points of the drift.
  const CoherenceVector vd = to_coherence(diag_density({0.8, 0.2}), basis);
  for (double t : {0.0, 0.7, 13.5}) {
    const CoherenceVector moved = reference_orbit(vd, plant, t);
    CHECK((moved.varrho - vd.varrho).cwiseAbs().maxCoeff() < 1e-12);
  }

  // Off-diagonal components rotate at the transition frequency E1 - E2;
  // the Cartan component stays put.
  CoherenceVector v0;
  v0.N = 2;
  v0.varrho = Eigen::VectorXd::Zero(3);
  v0.varrho << 0.5, 0.0, 0.5;
  const double omega = plant.energies()(0) - plant.energies()(1);
  for (double t : {0.3, 1.9}) {
    const CoherenceVector vt = reference_orbit(v0, plant, t);
    CHECK(std::abs(vt.varrho(0) - 0.5 * std::cos(omega * t)) < 1e-12);
    CHECK(std::abs(vt.varrho(1) - 0.5 * std::sin(omega * t)) < 1e-12);
    CHECK(std::abs(vt.varrho(2) - 0.5) < 1e-12);
  }
  CHECK((reference_orbit(v0, plant, 0.0).varrho - v0.varrho).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("feedback vanishes where the theory says it must") {
  const Plant plant = plant3_full();
  const GellMannBasis& basis = plant.basis();

  // <x, Bx> = 0 by skewness.
  std::mt19937 rng(53);
  const CoherenceVector v = to_coherence(
      DensityOperator::from_matrix(testing::random_density(3, rng)), basis);
  CHECK(std::abs(feedback_u(v, v, plant.B())) < 1e-14);

  // Antipodal (diagonal) pair.
  const CoherenceVector vd = to_coherence(diag_density({1, 0, 0}), basis);
  const CoherenceVector vp = to_coherence(diag_density({0, 0, 1}), basis);
  CHECK(std::abs(feedback_u(vd, vp, plant.B())) < 1e-15);

  // The blocked Example 2 configuration.
  const CoherenceVector blocked = to_coherence(blocked23_state(), basis);
  CHECK(std::abs(feedback_u(vd, blocked, plant.B())) < 1e-15);
}

TEST_CASE("Lyapunov functional values") {
  const GellMannBasis basis = build_basis(2);
  const CoherenceVector v1 = to_coherence(diag_density({1, 0}), basis);
  const CoherenceVector v2 = to_coherence(diag_density({0, 1}), basis);
  CHECK(lyapunov_V(v1, v1) == 0.0);
  CHECK(std::abs(lyapunov_V(v1, v2) - 1.0) < 1e-12);

  // Equal-purity pairs give V >= 0 (Cauchy-Schwarz at equal norms).
  std::mt19937 rng(59);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXcd rho = testing::random_density(2, rng);
    const Eigen::MatrixXcd U = testing::random_unitary(2, rng);
    const CoherenceVector a = to_coherence(DensityOperator::from_matrix(rho), basis);
    const CoherenceVector b =
        to_coherence(DensityOperator::from_matrix(U * rho * U.adjoint()), basis);
    CHECK(lyapunov_V(a, b) >= -1e-12);
  }
}

TEST_CASE("open-loop run preserves the drift invariants") {
  const Plant plant = plant3_full();
  const GellMannBasis& basis = plant.basis();
  std::mt19937 rng(61);
  const DensityOperator rho0 =
      DensityOperator::from_matrix(testing::random_density(3, rng));
  const DensityOperator rho_d = diag_density({1, 0, 0});

  SimulateOptions options;
  options.dt = 1e-3;
  options.T = 5.0;
  options.feedback_enabled = false;
  options.record_stride = 100;
  const TrajectoryRecord traj = simulate_closed_loop(plant, rho_d, rho0, options);

  const Eigen::VectorXd& first = traj.states.front();
  const SupportSet support0 = support_of_coeffs(first, basis, 1e-9);
  for (const Eigen::VectorXd& state : traj.states) {
    // Cartan components are integrals of motion.
    for (int a = 0; a < basis.dim(); ++a) {
      if (basis.label(a).kind == LabelKind::Diag) {
        CHECK(std::abs(state(a) - first(a)) < 1e-8);
      }
    }
    // Per-root-space norms are conserved.
    for (int a = 0; a < basis.dim(); ++a) {
      const BasisLabel& label = basis.label(a);
      if (label.kind == LabelKind::OffRe) {
        const int im = basis.position(LabelKind::OffIm, label.j, label.l);
        const double now = std::hypot(state(a), state(im));
        const double before = std::hypot(first(a), first(im));
        CHECK(std::abs(now - before) < 1e-8);
      }
    }
    // Supports do not move under the drift.
    const SupportSet s = support_of_coeffs(state, basis, 1e-9);
    CHECK(s.F_h == support0.F_h);
    CHECK(s.F_k == support0.F_k);
  }
  CHECK(traj.max_norm_drift < 1e-10);
  for (double drift : traj.eig_drift) CHECK(drift < 1e-9);
}

TEST_CASE("closed-loop two-level run converges and descends monotonically") {
  const Plant plant = plant2();
  const DensityOperator rho_d = diag_density({1, 0});
  Eigen::VectorXcd psi(2);
  psi << Complex(std::cos(0.55), 0.0), std::polar(std::sin(0.55), 0.4);
  const DensityOperator rho0 = pure_state(psi);

  SimulateOptions options;
  options.dt = 5e-4;
  options.T = 120.0;
  options.record_stride = 100;
  options.stop_on_convergence = true;
  const TrajectoryRecord traj = simulate_closed_loop(plant, rho_d, rho0, options);

  CHECK(traj.converged_time.has_value());
  CHECK(traj.final_V() < 1e-6);
  CHECK(traj.max_V_increase < 1e-10);
  CHECK(traj.max_lyapunov_defect < 5.0 * options.dt);
  CHECK(traj.max_norm_drift < 1e-9);
}

TEST_CASE("blocked initial state leaves the control silent") {
  const Plant plant = plant3_full();
  const DensityOperator rho_d = diag_density({1, 0, 0});
  const DensityOperator rho0 = blocked23_state();

  SimulateOptions options;
  options.dt = 1e-3;
  options.T = 20.0;
  options.record_stride = 50;
  const TrajectoryRecord traj = simulate_closed_loop(plant, rho_d, rho0, options);

  CHECK(traj.max_abs_control_all < 1e-12);
  CHECK(traj.max_V_deviation < 1e-10);
}

TEST_CASE("closed loop reduces to the drift at an antipodal start") {
  const Plant plant = plant3_full();
  const DensityOperator rho_d = diag_density({1, 0, 0});
  const DensityOperator rho0 = diag_density({0, 0, 1});

  SimulateOptions options;
  options.dt = 1e-3;
  options.T = 10.0;
  options.record_stride = 1000;
  const TrajectoryRecord traj = simulate_closed_loop(plant, rho_d, rho0, options);

  const Eigen::VectorXd v0 = traj.states.front();
  const Eigen::VectorXd expected =
      (options.T * plant.A().mat).exp() * v0;
  CHECK((traj.states.back() - expected).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(traj.max_abs_control_all < 1e-12);
}

TEST_CASE("rotating frame freezes the reference and preserves V") {
  const Plant plant = plant3_full();
  const GellMannBasis& basis = plant.basis();
  std::mt19937 rng(67);
  const DensityOperator rho_d = pure_state([&] {
    Eigen::VectorXcd psi(3);
    psi << Complex(0.7, 0.1), Complex(0.5, -0.3), Complex(0.4, 0.0);
    return psi;
  }());
  const DensityOperator rho0 =
      DensityOperator::from_matrix(testing::random_density(3, rng));

  SimulateOptions options;
  options.dt = 1e-3;
  options.T = 3.0;
  options.record_stride = 30;
  const TrajectoryRecord traj = simulate_closed_loop(plant, rho_d, rho0, options);
  const TrajectoryRecord rotated = rotating_frame(traj, plant);

  for (std::size_t i = 0; i < rotated.times.size(); ++i) {
    CHECK((rotated.reference[i] - rotated.reference.front()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(rotated.lyapunov[i] - traj.lyapunov[i]) < 1e-9);
  }

  // Drift-only trajectories become constant in the rotating frame.
  SimulateOptions open_loop = options;
  open_loop.feedback_enabled = false;
  const TrajectoryRecord drift = simulate_closed_loop(plant, rho_d, rho0, open_loop);
  const TrajectoryRecord frozen = rotating_frame(drift, plant);
  for (const Eigen::VectorXd& state : frozen.states) {
    CHECK((state - frozen.states.front()).cwiseAbs().maxCoeff() < 1e-9);
  }

  // A diagonal reference is unchanged by the frame change.
  const TrajectoryRecord diag_traj =
      simulate_closed_loop(plant, diag_density({1, 0, 0}), rho0, options);
  const TrajectoryRecord diag_rot = rotating_frame(diag_traj, plant);
  for (std::size_t i = 0; i < diag_rot.times.size(); ++i) {
    CHECK((diag_rot.reference[i] - diag_traj.reference[i]).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("step guard rejects oversized steps") {
  const Plant plant = plant2();
  SimulateOptions options;
  options.dt = 5.0;
  options.T = 10.0;
  CHECK_THROWS_AS(
      simulate_closed_loop(plant, diag_density({1, 0}), diag_density({0.6, 0.4}), options),
      StepError);

  options.dt = -1.0;
  CHECK_THROWS_AS(
      simulate_closed_loop(plant, diag_density({1, 0}), diag_density({0.6, 0.4}), options),
      ConfigError);
}

TEST_CASE("Runge-Kutta cross-check stays close to the Lie stepper") {
  const Plant plant = plant2();
  const DensityOperator rho_d = diag_density({1, 0});
  Eigen::VectorXcd psi(2);
  psi << Complex(std::cos(0.55), 0.0), std::polar(std::sin(0.55), 0.4);
  const DensityOperator rho0 = pure_state(psi);

  SimulateOptions lie;
  lie.dt = 1e-3;
  lie.T = 2.0;
  lie.record_stride = 2000;
  SimulateOptions rk = lie;
  rk.integrator = SimulateOptions::Integrator::RungeKutta4;

  const TrajectoryRecord a = simulate_closed_loop(plant, rho_d, rho0, lie);
  const TrajectoryRecord b = simulate_closed_loop(plant, rho_d, rho0, rk);
  CHECK((a.states.back() - b.states.back()).cwiseAbs().maxCoeff() < 5e-3);
  CHECK(std::abs(a.final_V() - b.final_V()) < 5e-3);
}

TEST_CASE("trajectory CSV has the documented layout") {
  const Plant plant = plant2();
  SimulateOptions options;
  options.dt = 1e-3;
  options.T = 0.01;
  const TrajectoryRecord traj =
      simulate_closed_loop(plant, diag_density({1, 0}), diag_density({0.7, 0.3}), options);

  std::ostringstream out;
  write_trajectory_csv(traj, out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "t,u,V,eig_drift,varrho_0,varrho_1,varrho_2,ref_0,ref_1,ref_2");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == static_cast<int>(traj.times.size()));
}
