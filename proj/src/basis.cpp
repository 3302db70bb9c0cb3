#include "qflag/basis.hpp"

#include <cmath>
#include <sstream>

namespace qflag {

namespace {

constexpr double kTracelessTol = 1e-10;
constexpr double kSymmetryTol = 1e-10;
constexpr double kConstantDropTol = 1e-14;

Eigen::MatrixXcd elementary(int N, int j, int l) {
  Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(N, N);
  E(j - 1, l - 1) = Complex(1.0, 0.0);
  return E;
}

// Coefficients of a traceless Hermitian M in the lambda basis, no validation.
Eigen::VectorXd project_hermitian(const Eigen::MatrixXcd& M, const GellMannBasis& basis) {
  Eigen::VectorXd c(basis.dim());
  for (int a = 0; a < basis.dim(); ++a) {
    c(a) = (M * basis.matrix(a)).trace().real();
  }
  return c;
}

}  // namespace

std::string to_string(const BasisLabel& label) {
  std::ostringstream out;
  switch (label.kind) {
    case LabelKind::Diag:
      out << "h" << label.j;
      break;
    case LabelKind::OffRe:
      out << "re" << label.j << label.l;
      break;
    case LabelKind::OffIm:
      out << "im" << label.j << label.l;
      break;
  }
  return out.str();
}

double StructureConstants::c(int j, int k, int l) const {
  for (const auto& [idx, value] : slice(j, k)) {
    if (idx == l) return value;
  }
  return 0.0;
}

const std::vector<std::pair<int, double>>& StructureConstants::slice(int j, int k) const {
  return slices_[static_cast<std::size_t>(j) * n_ + k];
}

GellMannBasis GellMannBasis::build(int N) {
  if (N < 2 || N > 12) {
    throw DimensionError("GellMannBasis: N must be in [2, 12], got " + std::to_string(N));
  }

  GellMannBasis basis;
  basis.N_ = N;
  basis.n_ = N * N - 1;
  basis.lambda0_ = Eigen::MatrixXcd::Identity(N, N) / std::sqrt(double(N));
  basis.diag_position_.assign(N, -1);
  basis.offre_position_.assign(N + 1, std::vector<int>(N + 1, -1));
  basis.offim_position_.assign(N + 1, std::vector<int>(N + 1, -1));

  const Complex I(0.0, 1.0);
  int pos = 0;
  for (int l = 2; l <= N; ++l) {
    for (int j = 1; j < l; ++j) {
      basis.matrices_.push_back((elementary(N, j, l) + elementary(N, l, j)) / std::sqrt(2.0));
      basis.labels_.push_back({LabelKind::OffRe, j, l, pos});
      basis.offre_position_[j][l] = pos++;

      basis.matrices_.push_back(I * (-elementary(N, j, l) + elementary(N, l, j)) /
                                std::sqrt(2.0));
      basis.labels_.push_back({LabelKind::OffIm, j, l, pos});
      basis.offim_position_[j][l] = pos++;
    }
    const int j = l - 1;
    Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(N, N);
    for (int p = 1; p <= j; ++p) diag(p - 1, p - 1) = 1.0;
    diag(j, j) = -double(j);
    basis.matrices_.push_back(diag / std::sqrt(double(j) * (j + 1)));
    basis.labels_.push_back({LabelKind::Diag, j, 0, pos});
    basis.diag_position_[j] = pos++;
  }

  // Structure constants from pairwise commutators, dropping roundoff zeros.
  const int n = basis.n_;
  basis.constants_.n_ = n;
  basis.constants_.slices_.resize(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      const Eigen::MatrixXcd comm =
          basis.matrices_[j] * basis.matrices_[k] - basis.matrices_[k] * basis.matrices_[j];
      const Eigen::VectorXd coeffs = project_hermitian(comm / I, basis);
      auto& fwd = basis.constants_.slices_[static_cast<std::size_t>(j) * n + k];
      auto& rev = basis.constants_.slices_[static_cast<std::size_t>(k) * n + j];
      for (int l = 0; l < n; ++l) {
        if (std::abs(coeffs(l)) > kConstantDropTol) {
          fwd.emplace_back(l, coeffs(l));
          rev.emplace_back(l, -coeffs(l));
        }
      }
    }
  }
  return basis;
}

bool GellMannBasis::valid(LabelKind kind, int j, int l) const {
  if (kind == LabelKind::Diag) return j >= 1 && j <= N_ - 1;
  return j >= 1 && j < l && l <= N_;
}

int GellMannBasis::position(LabelKind kind, int j, int l) const {
  if (!valid(kind, j, l)) {
    throw DimensionError("GellMannBasis: invalid label indices (" + std::to_string(j) + "," +
                         std::to_string(l) + ") for N=" + std::to_string(N_));
  }
  switch (kind) {
    case LabelKind::Diag:
      return diag_position_[j];
    case LabelKind::OffRe:
      return offre_position_[j][l];
    case LabelKind::OffIm:
      return offim_position_[j][l];
  }
  return -1;  // unreachable
}

Eigen::VectorXd expand_in_basis(const Eigen::MatrixXcd& M, const GellMannBasis& basis,
                                MatrixConvention convention) {
  const int N = basis.levels();
  if (M.rows() != N || M.cols() != N) {
    throw DimensionMismatch("expand_in_basis: matrix size does not match basis");
  }
  if (std::abs(M.trace()) > kTracelessTol) {
    throw NotTraceless("expand_in_basis: |tr M| = " + std::to_string(std::abs(M.trace())));
  }
  const double herm_defect = (M - M.adjoint()).cwiseAbs().maxCoeff();
  const double anti_defect = (M + M.adjoint()).cwiseAbs().maxCoeff();
  if (convention == MatrixConvention::Hermitian) {
    if (herm_defect > kSymmetryTol) {
      throw ConventionMismatch("expand_in_basis: matrix is not Hermitian (defect " +
                               std::to_string(herm_defect) + ")");
    }
    return project_hermitian(M, basis);
  }
  if (anti_defect > kSymmetryTol) {
    throw ConventionMismatch("expand_in_basis: matrix is not anti-Hermitian (defect " +
                             std::to_string(anti_defect) + ")");
  }
  // M = sum c_a (-i lambda_a)  =>  c_a = i tr(lambda_a M).
  Eigen::VectorXd c(basis.dim());
  const Complex I(0.0, 1.0);
  for (int a = 0; a < basis.dim(); ++a) {
    c(a) = (I * (basis.matrix(a) * M).trace()).real();
  }
  return c;
}

Eigen::VectorXd commutator_coeffs(const BasisLabel& a, const BasisLabel& b,
                                  const GellMannBasis& basis) {
  const int pa = basis.position(a.kind, a.j, a.l);
  const int pb = basis.position(b.kind, b.j, b.l);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.dim());
  for (const auto& [l, value] : basis.structure_constants().slice(pa, pb)) {
    c(l) = value;
  }
  return c;
}

AdjointGenerator adjoint_matrix(const Eigen::VectorXd& h, const GellMannBasis& basis) {
  const int n = basis.dim();
  if (h.size() != n) {
    throw DimensionMismatch("adjoint_matrix: coefficient vector size " +
                            std::to_string(h.size()) + " != n = " + std::to_string(n));
  }
  if (!h.allFinite()) {
    throw ConfigError("adjoint_matrix: coefficients must be finite");
  }
  AdjointGenerator gen;
  gen.source_coeffs = h;
  gen.mat = Eigen::MatrixXd::Zero(n, n);
  const StructureConstants& sc = basis.structure_constants();
  for (int a = 0; a < n; ++a) {
    if (h(a) == 0.0) continue;
    for (int k = 0; k < n; ++k) {
      for (const auto& [l, value] : sc.slice(a, k)) {
        gen.mat(l, k) += h(a) * value;
      }
    }
  }
  return gen;
}

}  // namespace qflag
