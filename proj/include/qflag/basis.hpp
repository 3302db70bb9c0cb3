#ifndef QFLAG_BASIS_HPP
#define QFLAG_BASIS_HPP

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "qflag/errors.hpp"

namespace qflag {

using Complex = std::complex<double>;

enum class LabelKind { Diag, OffRe, OffIm };

/// Label of one generalized Gell-Mann matrix. Diagonal elements carry an
/// index j in [1, N-1]; off-diagonal elements carry a slot 1 <= j < l <= N.
struct BasisLabel {
  LabelKind kind = LabelKind::Diag;
  int j = 0;
  int l = 0;  // unused (0) for Diag
  int position = 0;

  bool operator==(const BasisLabel& other) const {
    return kind == other.kind && j == other.j && l == other.l;
  }
};

std::string to_string(const BasisLabel& label);

/// Structure constants c of su(N) relative to the basis {-i lambda_a}:
/// [-i lambda_j, -i lambda_k] = sum_l c[j][k][l] (-i lambda_l).
/// Stored sparse; most entries vanish.
class StructureConstants {
public:
  double c(int j, int k, int l) const;

  /// Nonzero entries of the slice c[j][k][.] as (l, value) pairs.
  const std::vector<std::pair<int, double>>& slice(int j, int k) const;

  int dim() const { return n_; }

private:
  friend class GellMannBasis;
  StructureConstants() = default;

  int n_ = 0;
  std::vector<std::vector<std::pair<int, double>>> slices_;  // n*n slots
};

/// Ordered orthonormal Hermitian basis of su(N) (generalized Gell-Mann
/// matrices), together with the trace direction lambda0 = I/sqrt(N).
///
/// Ordering: for l = 2..N emit OffRe(j,l), OffIm(j,l) for j = 1..l-1, then
/// Diag(l-1). For N = 3 this is the textbook 3-level ordering
/// {re12, im12, h1, re13, im13, re23, im23, h2}. The paper ordering is only
/// pinned for N = 2, 3; the general-N interleaving is this library's
/// convention.
class GellMannBasis {
public:
  /// Builds the basis for an N-level system, 2 <= N <= 12. The cap keeps the
  /// factorial antipodal enumeration downstream bounded.
  static GellMannBasis build(int N);

  int levels() const { return N_; }
  int dim() const { return n_; }

  const Eigen::MatrixXcd& matrix(int position) const { return matrices_[position]; }
  const BasisLabel& label(int position) const { return labels_[position]; }
  const std::vector<Eigen::MatrixXcd>& matrices() const { return matrices_; }
  const std::vector<BasisLabel>& labels() const { return labels_; }
  const Eigen::MatrixXcd& lambda0() const { return lambda0_; }

  /// Position of a label in the ordered basis; throws DimensionError for
  /// labels outside the valid index ranges.
  int position(LabelKind kind, int j, int l = 0) const;

  const StructureConstants& structure_constants() const { return constants_; }

  /// True when the label indices are admissible for this N.
  bool valid(LabelKind kind, int j, int l = 0) const;

private:
  GellMannBasis() = default;

  int N_ = 0;
  int n_ = 0;
  std::vector<Eigen::MatrixXcd> matrices_;
  std::vector<BasisLabel> labels_;
  Eigen::MatrixXcd lambda0_;
  std::vector<int> diag_position_;                // [j]
  std::vector<std::vector<int>> offre_position_;  // [j][l]
  std::vector<std::vector<int>> offim_position_;
  StructureConstants constants_;
};

inline GellMannBasis build_basis(int N) { return GellMannBasis::build(N); }

enum class MatrixConvention { Hermitian, AntiHermitian };

/// Coefficients of a traceless matrix in the basis: M = sum c_a lambda_a for
/// the Hermitian convention, M = sum c_a (-i lambda_a) for the anti-Hermitian
/// one. Throws NotTraceless / ConventionMismatch.
Eigen::VectorXd expand_in_basis(const Eigen::MatrixXcd& M, const GellMannBasis& basis,
                                MatrixConvention convention = MatrixConvention::Hermitian);

/// Expansion of [lambda_a, lambda_b] / i in the basis.
Eigen::VectorXd commutator_coeffs(const BasisLabel& a, const BasisLabel& b,
                                  const GellMannBasis& basis);

inline const StructureConstants& structure_constants(const GellMannBasis& basis) {
  return basis.structure_constants();
}

/// Real n x n skew-symmetric matrix representing -i ad_H on coherence
/// vectors, for H = h . lambda.
struct AdjointGenerator {
  Eigen::MatrixXd mat;
  Eigen::VectorXd source_coeffs;
};

AdjointGenerator adjoint_matrix(const Eigen::VectorXd& h, const GellMannBasis& basis);

}  // namespace qflag

#endif  // QFLAG_BASIS_HPP
