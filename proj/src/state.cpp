#include "qflag/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qflag {

namespace {
constexpr double kHermitianTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kEigenFloor = -1e-8;
constexpr double kPurityTol = 1e-10;
}  // namespace

DensityOperator DensityOperator::from_matrix(const Eigen::MatrixXcd& rho) {
  if (rho.rows() != rho.cols() || rho.rows() < 2) {
    throw InvalidDensity("density must be a square matrix with N >= 2");
  }
  const double herm_defect = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm_defect > kHermitianTol) {
    throw InvalidDensity("density is not Hermitian (defect " + std::to_string(herm_defect) + ")");
  }
  const double trace_defect = std::abs(rho.trace() - Complex(1.0, 0.0));
  if (trace_defect > kTraceTol) {
    throw InvalidDensity("density trace differs from 1 by " + std::to_string(trace_defect));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig < kEigenFloor) {
    throw InvalidDensity("density has eigenvalue " + std::to_string(min_eig));
  }
  const double purity = (rho * rho).trace().real();
  if (purity > 1.0 + kPurityTol) {
    throw InvalidDensity("density purity " + std::to_string(purity) + " exceeds 1");
  }
  return DensityOperator(rho);
}

Eigen::VectorXd DensityOperator::sorted_eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho_, Eigen::EigenvaluesOnly);
  Eigen::VectorXd w = solver.eigenvalues();
  std::sort(w.data(), w.data() + w.size(), std::greater<double>());
  return w;
}

CoherenceVector to_coherence(const DensityOperator& rho, const GellMannBasis& basis) {
  if (rho.levels() != basis.levels()) {
    throw DimensionMismatch("to_coherence: density and basis dimension differ");
  }
  CoherenceVector v;
  v.N = basis.levels();
  v.varrho.resize(basis.dim());
  for (int a = 0; a < basis.dim(); ++a) {
    v.varrho(a) = (rho.matrix() * basis.matrix(a)).trace().real();
  }
  return v;
}

DensityOperator from_coherence(const CoherenceVector& v, const GellMannBasis& basis) {
  if (v.N != basis.levels() || v.varrho.size() != basis.dim()) {
    throw DimensionMismatch("from_coherence: vector and basis dimension differ");
  }
  const int N = basis.levels();
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(N, N) / double(N);
  for (int a = 0; a < basis.dim(); ++a) {
    rho += v.varrho(a) * basis.matrix(a);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig < kEigenFloor) {
    throw NotPositive("coherence vector maps outside the state set (min eigenvalue " +
                      std::to_string(min_eig) + ")");
  }
  return DensityOperator::from_matrix(rho);
}

double distance(const CoherenceVector& v1, const CoherenceVector& v2) {
  if (v1.N != v2.N) {
    throw DimensionMismatch("distance: coherence vectors have different N");
  }
  return v1.varrho.squaredNorm() - v1.varrho.dot(v2.varrho);
}

bool SupportSet::intersects(const SupportSet& other) const {
  for (int j : F_h) {
    if (other.F_h.count(j)) return true;
  }
  for (const auto& slot : F_k) {
    if (other.F_k.count(slot)) return true;
  }
  return false;
}

SupportSet support_of_coeffs(const Eigen::VectorXd& coeffs, const GellMannBasis& basis,
                             double tol) {
  if (coeffs.size() != basis.dim()) {
    throw DimensionMismatch("support: coefficient vector does not match basis");
  }
  if (tol <= 0.0) {
    throw ConfigError("support: tolerance must be positive");
  }
  SupportSet s;
  for (int a = 0; a < basis.dim(); ++a) {
    const BasisLabel& label = basis.label(a);
    if (label.kind == LabelKind::Diag) {
      if (std::abs(coeffs(a)) > tol) s.F_h.insert(label.j);
    } else if (label.kind == LabelKind::OffRe) {
      const int im = basis.position(LabelKind::OffIm, label.j, label.l);
      if (std::hypot(coeffs(a), coeffs(im)) > tol) s.F_k.insert({label.j, label.l});
    }
  }
  return s;
}

SupportSet support(const CoherenceVector& v, const GellMannBasis& basis, double tol) {
  if (v.N != basis.levels()) {
    throw DimensionMismatch("support: coherence vector does not match basis");
  }
  return support_of_coeffs(v.varrho, basis, tol);
}

HamiltonianSpec HamiltonianSpec::diagonal(const Eigen::VectorXd& energies) {
  const double sum = energies.sum();
  if (std::abs(sum) > 1e-9) {
    throw ConfigError("HamiltonianSpec: energies must sum to zero (sum " + std::to_string(sum) +
                      ")");
  }
  HamiltonianSpec spec;
  spec.diagonal_form = true;
  spec.energies = energies;
  return spec;
}

HamiltonianSpec HamiltonianSpec::coefficients(const Eigen::VectorXd& coeffs) {
  HamiltonianSpec spec;
  spec.diagonal_form = false;
  spec.coeffs = coeffs;
  return spec;
}

Eigen::VectorXd HamiltonianSpec::to_coeffs(const GellMannBasis& basis) const {
  if (!diagonal_form) {
    if (coeffs.size() != basis.dim()) {
      throw DimensionMismatch("HamiltonianSpec: coefficient vector does not match basis");
    }
    return coeffs;
  }
  if (energies.size() != basis.levels()) {
    throw DimensionMismatch("HamiltonianSpec: energy vector does not match basis");
  }
  Eigen::VectorXd h = Eigen::VectorXd::Zero(basis.dim());
  for (int j = 1; j <= basis.levels() - 1; ++j) {
    const int pos = basis.position(LabelKind::Diag, j);
    const Eigen::MatrixXcd& lambda = basis.matrix(pos);
    Complex acc = 0.0;
    for (int p = 0; p < basis.levels(); ++p) acc += energies(p) * lambda(p, p);
    h(pos) = acc.real();
  }
  return h;
}

Regularity is_strongly_regular(const Eigen::VectorXd& energies, double tol) {
  const int N = static_cast<int>(energies.size());
  for (int j = 0; j < N; ++j) {
    for (int l = j + 1; l < N; ++l) {
      if (std::abs(energies(j) - energies(l)) <= tol) return Regularity::Degenerate;
    }
  }
  // All gaps E_j - E_l over ordered pairs must be pairwise distinct.
  std::vector<double> gaps;
  for (int j = 0; j < N; ++j) {
    for (int l = 0; l < N; ++l) {
      if (j != l) gaps.push_back(energies(j) - energies(l));
    }
  }
  std::sort(gaps.begin(), gaps.end());
  for (std::size_t i = 1; i < gaps.size(); ++i) {
    if (gaps[i] - gaps[i - 1] <= tol) return Regularity::Regular;
  }
  return Regularity::StronglyRegular;
}

Regularity is_strongly_regular(const HamiltonianSpec& hA, double tol) {
  if (!hA.diagonal_form) {
    throw ConfigError("is_strongly_regular: spec must be in diagonal (energy) form");
  }
  return is_strongly_regular(hA.energies, tol);
}

}  // namespace qflag
