#include <cmath>

#include "qflag/scenario.hpp"

namespace qflag {

namespace {

DensityInput diagonal_input(std::initializer_list<double> entries) {
  DensityInput input;
  input.form = DensityInput::Form::Diagonal;
  input.values = Eigen::VectorXd(entries.size());
  int i = 0;
  for (double w : entries) input.values(i++) = w;
  return input;
}

DensityInput matrix_input(const Eigen::MatrixXcd& rho) {
  DensityInput input;
  input.form = DensityInput::Form::Matrix;
  input.matrix = rho;
  return input;
}

DensityInput pure_state(const Eigen::VectorXcd& psi) {
  const Eigen::VectorXcd normalized = psi / psi.norm();
  return matrix_input(normalized * normalized.adjoint());
}

// Complex Givens rotation in the (j, l) plane (1-based indices).
Eigen::MatrixXcd plane_rotation(int N, int j, int l, double theta, double phase = 0.0) {
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(N, N);
  const Complex e_plus = std::polar(1.0, phase);
  U(j - 1, j - 1) = std::cos(theta);
  U(l - 1, l - 1) = std::cos(theta);
  U(j - 1, l - 1) = -std::sin(theta) * std::conj(e_plus);
  U(l - 1, j - 1) = std::sin(theta) * e_plus;
  return U;
}

Eigen::MatrixXcd diag_density(std::initializer_list<double> entries) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(entries.size(), entries.size());
  int i = 0;
  for (double w : entries) {
    rho(i, i) = w;
    ++i;
  }
  return rho;
}

Eigen::VectorXd energies2() { return Eigen::Vector2d(-0.5, 0.5); }
Eigen::VectorXd energies3() { return Eigen::Vector3d(-0.7, 0.1, 0.6); }
Eigen::VectorXd energies4() { return Eigen::Vector4d(-0.75, -0.15, 0.3, 0.6); }

std::vector<HBTerm> hB2() { return {{LabelKind::OffRe, 1, 2, 0.8}}; }
std::vector<HBTerm> hB3_nn() {
  return {{LabelKind::OffRe, 1, 2, 0.8}, {LabelKind::OffRe, 2, 3, 0.7}};
}
std::vector<HBTerm> hB3_full() {
  return {{LabelKind::OffRe, 1, 2, 0.8},
          {LabelKind::OffRe, 1, 3, 0.6},
          {LabelKind::OffRe, 2, 3, 0.7}};
}
std::vector<HBTerm> hB3_gap23() {
  // Direct (2,3) coupling missing: the nearest-neighbor hypothesis fails.
  return {{LabelKind::OffRe, 1, 2, 0.8}, {LabelKind::OffRe, 1, 3, 0.6}};
}
std::vector<HBTerm> hB4() {
  return {{LabelKind::OffRe, 1, 2, 0.7}, {LabelKind::OffRe, 2, 3, 0.6},
          {LabelKind::OffRe, 3, 4, 0.65}, {LabelKind::OffRe, 1, 3, 0.4},
          {LabelKind::OffRe, 1, 4, 0.3},  {LabelKind::OffRe, 2, 4, 0.35}};
}

// Generic pure state touching every root space.
Eigen::VectorXcd generic_psi3() {
  Eigen::VectorXcd psi(3);
  psi << Complex(0.8, 0.0), Complex(0.36, 0.2), Complex(0.3, -0.25);
  return psi;
}

Scenario convergent_defaults(Scenario s) {
  s.dt = 5e-4;
  s.T = 200.0;
  s.record_stride = 200;
  return s;
}

Scenario silent_defaults(Scenario s) {
  s.dt = 1e-3;
  s.T = 25.0;
  s.record_stride = 25;
  return s;
}

Scenario short_defaults(Scenario s) {
  s.dt = 1e-3;
  s.T = 10.0;
  s.record_stride = 100;
  return s;
}

Scenario with_expectation(Scenario s, VerdictOutcome outcome, ExpectedBehavior behavior) {
  s.expected = Expectation{outcome, behavior};
  return s;
}

std::vector<Scenario> make_builtins() {
  std::vector<Scenario> out;

  // --- N = 2 ---
  {
    Scenario s;
    s.name = "ex1-diagonal-target";
    s.N = 2;
    s.energies = energies2();
    s.hB_terms = hB2();
    s.rho_d = diagonal_input({1.0, 0.0});
    Eigen::VectorXcd psi(2);
    psi << Complex(std::cos(0.55), 0.0), std::polar(std::sin(0.55), 0.4);
    s.rho0 = pure_state(psi);
    out.push_back(with_expectation(convergent_defaults(s), VerdictOutcome::ExpectedConvergence,
                                   ExpectedBehavior::ConvergesBelowTol));
  }
  {
    Scenario s;
    s.name = "ex1-mixed-diagonal-target";
    s.N = 2;
    s.energies = energies2();
    s.hB_terms = hB2();
    s.rho_d = diagonal_input({0.8, 0.2});
    const Eigen::MatrixXcd U = plane_rotation(2, 1, 2, 0.7, 0.3);
    s.rho0 = matrix_input(U * diag_density({0.8, 0.2}) * U.adjoint());
    out.push_back(with_expectation(convergent_defaults(s), VerdictOutcome::ExpectedConvergence,
                                   ExpectedBehavior::ConvergesBelowTol));
  }
  {
    Scenario s;
    s.name = "ex1-antipodal";
    s.N = 2;
    s.energies = energies2();
    s.hB_terms = hB2();
    s.rho_d = diagonal_input({1.0, 0.0});
    s.rho0 = diagonal_input({0.0, 1.0});
    out.push_back(with_expectation(silent_defaults(s), VerdictOutcome::AntipodalObstruction,
                                   ExpectedBehavior::ControlSilent));
  }
  {
    // Off-diagonal reference: the cardinality condition fails and the verdict
    // is inconclusive. The run illustrates why: V descends while the state
    // drains its Cartan component, then stalls on the equator (an invariant
    // critical circle) at a fixed phase offset from the reference.
    Scenario s;
    s.name = "ex1-offdiag-target";
    s.N = 2;
    s.energies = energies2();
    s.hB_terms = hB2();
    Eigen::MatrixXcd plus_i(2, 2);
    plus_i << Complex(0.5, 0.0), Complex(0.0, -0.5), Complex(0.0, 0.5), Complex(0.5, 0.0);
    s.rho_d = matrix_input(plus_i);
    Eigen::VectorXcd psi(2);
    psi << Complex(std::cos(0.9), 0.0), Complex(std::sin(0.9), 0.0);
    s.rho0 = pure_state(psi);
    s.dt = 5e-4;
    s.T = 60.0;
    s.record_stride = 200;
    out.push_back(with_expectation(s, VerdictOutcome::InsufficientCardinality,
                                   ExpectedBehavior::None));
  }
  {
    // Reference and state both on the great horizontal circle: no h component
    // anywhere, u stays identically zero.
    Scenario s;
    s.name = "ex1-equator-both";
    s.N = 2;
    s.energies = energies2();
    s.hB_terms = hB2();
    Eigen::MatrixXcd plus_i(2, 2);
    plus_i << Complex(0.5, 0.0), Complex(0.0, -0.5), Complex(0.0, 0.5), Complex(0.5, 0.0);
    s.rho_d = matrix_input(plus_i);
    Eigen::MatrixXcd plus(2, 2);
    plus << Complex(0.5, 0.0), Complex(0.5, 0.0), Complex(0.5, 0.0), Complex(0.5, 0.0);
    s.rho0 = matrix_input(plus);
    out.push_back(with_expectation(silent_defaults(s), VerdictOutcome::SupportDisjoint,
                                   ExpectedBehavior::ControlSilent));
  }

  // --- N = 3, pure reference ---
  {
    Scenario s;
    s.name = "ex2-ground-nn";
    s.N = 3;
    s.energies = energies3();
    s.hB_terms = hB3_nn();
    s.rho_d = diagonal_input({1.0, 0.0, 0.0});
    s.rho0 = pure_state(generic_psi3());
    out.push_back(with_expectation(short_defaults(s), VerdictOutcome::InsufficientCardinality,
                                   ExpectedBehavior::None));
  }
  {
    Scenario s;
    s.name = "ex2-ground-full";
    s.N = 3;
    s.energies = energies3();
    s.hB_terms = hB3_full();
    s.rho_d = diagonal_input({1.0, 0.0, 0.0});
    s.rho0 = pure_state(generic_psi3());
    out.push_back(with_expectation(convergent_defaults(s), VerdictOutcome::ExpectedConvergence,
                                   ExpectedBehavior::ConvergesBelowTol));
  }
  {
    // Pure state confined to the (2,3) block: isospectral to rho_d and
    // commuting with it, so the closed loop reduces to the drift even though
    // the linearization at rho_d is controllable.
    Scenario s;
    s.name = "ex2-blocked-23";
    s.N = 3;
    s.energies = energies3();
    s.hB_terms = hB3_full();
    s.rho_d = diagonal_input({1.0, 0.0, 0.0});
    Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(3, 3);
    rho0(1, 1) = rho0(1, 2) = rho0(2, 1) = rho0(2, 2) = 0.5;
    s.rho0 = matrix_input(rho0);
    out.push_back(with_expectation(silent_defaults(s), VerdictOutcome::AntipodalObstruction,
                                   ExpectedBehavior::ControlSilent));
  }
  {
    Scenario s;
    s.name = "ex2-middle-nn";
    s.N = 3;
    s.energies = energies3();
    s.hB_terms = hB3_nn();
    s.rho_d = diagonal_input({0.0, 1.0, 0.0});
    s.rho0 = pure_state(generic_psi3());
    out.push_back(with_expectation(convergent_defaults(s), VerdictOutcome::ExpectedConvergence,
                                   ExpectedBehavior::ConvergesBelowTol));
  }
  {
    Scenario s;
    s.name = "ex2-middle-full";
    s.N = 3;
    s.energies = energies3();
    s.hB_terms = hB3_full();
    s.rho_d = diagonal_input({0.0, 1.0, 0.0});
    s.rho0 = pure_state(generic_psi3());
    out.push_back(with_expectation(convergent_defaults(s), VerdictOutcome::ExpectedConvergence,
                                   ExpectedBehavior::ConvergesBelowTol));
  }
  {
    Scenario s;
    s.name = "ex2-antipodal-eigenstates";
    s.N = 3;
    s.energies = energies3();
    s.hB_terms = hB3_full();
    s.rho_d = diagonal_input({1.0, 0.0, 0.0});
    s.rho0 = diagonal_input({0.0, 0.0, 1.0});
    out.push_back(with_expectation(silent_defaults(s), VerdictOutcome::AntipodalObstruction,
                                   ExpectedBehavior::ControlSilent));
  }

  // --- N = 3, generic (all-distinct) reference ---
  const Eigen::MatrixXcd mixer = plane_rotation(3, 1, 2, 0.6) *
                                 plane_rotation(3, 2, 3, 0.8, 0.5) *
                                 plane_rotation(3, 1, 3, 0.4, 0.2);
  {
    Scenario s;
    s.name = "ex2-generic-nn";
    s.N = 3;
    s.energies = energies3();
    s.hB_terms = hB3_nn();
    s.rho_d = diagonal_input({0.6, 0.3, 0.1});
    s.rho0 = matrix_input(mixer * diag_density({0.6, 0.3, 0.1}) * mixer.adjoint());
    out.push_back(with_expectation(short_defaults(s), VerdictOutcome::InsufficientCardinality,
                                   ExpectedBehavior::None));
  }
  {
    // The m = 6 orbit converges noticeably slower than the pure-state cases;
    // the horizon is sized for its measured tail.
    Scenario s;
    s.name = "ex2-generic-full";
    s.N = 3;
    s.energies = energies3();
    s.hB_terms = hB3_full();
    s.rho_d = diagonal_input({0.6, 0.3, 0.1});
    s.rho0 = matrix_input(mixer * diag_density({0.6, 0.3, 0.1}) * mixer.adjoint());
    s = convergent_defaults(s);
    s.T = 650.0;
    out.push_back(with_expectation(s, VerdictOutcome::ExpectedConvergence,
                                   ExpectedBehavior::ConvergesBelowTol));
  }
  {
    Scenario s;
    s.name = "ex2-generic-antipodal";
    s.N = 3;
    s.energies = energies3();
    s.hB_terms = hB3_full();
    s.rho_d = diagonal_input({0.6, 0.3, 0.1});
    s.rho0 = diagonal_input({0.3, 0.6, 0.1});
    out.push_back(with_expectation(silent_defaults(s), VerdictOutcome::AntipodalObstruction,
                                   ExpectedBehavior::ControlSilent));
  }
  {
    // Isospectral state whose only coherence sits in the (1,3) root space,
    // which nearest-neighbor coupling never reaches from a diagonal reference:
    // supports disjoint, but the states do not commute (not antipodal).
    Scenario s;
    s.name = "ex2-disjoint-13";
    s.N = 3;
    s.energies = energies3();
    s.hB_terms = hB3_nn();
    s.rho_d = diagonal_input({0.6, 0.3, 0.1});
    const Eigen::MatrixXcd U = plane_rotation(3, 1, 3, 0.5);
    s.rho0 = matrix_input(U * diag_density({0.6, 0.3, 0.1}) * U.adjoint());
    out.push_back(with_expectation(silent_defaults(s), VerdictOutcome::SupportDisjoint,
                                   ExpectedBehavior::ControlSilent));
  }
  {
    Scenario s;
    s.name = "ex2-nn-missing";
    s.N = 3;
    s.energies = energies3();
    s.hB_terms = hB3_gap23();
    Eigen::MatrixXcd rho_d = Eigen::MatrixXcd::Zero(3, 3);
    rho_d(1, 1) = rho_d(1, 2) = rho_d(2, 1) = rho_d(2, 2) = 0.5;
    s.rho_d = matrix_input(rho_d);
    Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(3, 3);
    rho0(0, 0) = rho0(0, 1) = rho0(1, 0) = rho0(1, 1) = 0.5;
    s.rho0 = matrix_input(rho0);
    out.push_back(with_expectation(short_defaults(s), VerdictOutcome::NotApplicable,
                                   ExpectedBehavior::None));
  }

  // --- N = 4, non-overlapping block states ---
  {
    Scenario s;
    s.name = "ex4-block-nonoverlap";
    s.N = 4;
    s.energies = energies4();
    s.hB_terms = hB4();
    Eigen::VectorXcd psi_d(4);
    psi_d << Complex(std::cos(0.7), 0.0), std::polar(std::sin(0.7), 0.3), Complex(0.0, 0.0),
        Complex(0.0, 0.0);
    s.rho_d = pure_state(psi_d);
    Eigen::VectorXcd psi0(4);
    psi0 << Complex(0.0, 0.0), Complex(0.0, 0.0), Complex(std::cos(0.6), 0.0),
        std::polar(std::sin(0.6), 0.2);
    s.rho0 = pure_state(psi0);
    out.push_back(with_expectation(silent_defaults(s), VerdictOutcome::AntipodalObstruction,
                                   ExpectedBehavior::ControlSilent));
  }

  return out;
}

}  // namespace

const std::vector<Scenario>& builtin_scenarios() {
  static const std::vector<Scenario> scenarios = make_builtins();
  return scenarios;
}

}  // namespace qflag
