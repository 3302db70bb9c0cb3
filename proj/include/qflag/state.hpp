#ifndef QFLAG_STATE_HPP
#define QFLAG_STATE_HPP

#include <Eigen/Dense>
#include <set>
#include <utility>

#include "qflag/basis.hpp"
#include "qflag/errors.hpp"

namespace qflag {

/// Validated N x N density operator: Hermitian, unit trace, positive
/// semidefinite (eigenvalue floor -1e-8), purity <= 1.
class DensityOperator {
public:
  static DensityOperator from_matrix(const Eigen::MatrixXcd& rho);

  const Eigen::MatrixXcd& matrix() const { return rho_; }
  int levels() const { return static_cast<int>(rho_.rows()); }
  double purity() const { return (rho_ * rho_).trace().real(); }

  /// Eigenvalues sorted descending.
  Eigen::VectorXd sorted_eigenvalues() const;

private:
  explicit DensityOperator(Eigen::MatrixXcd rho) : rho_(std::move(rho)) {}
  Eigen::MatrixXcd rho_;
};

/// Real coordinates of a density along the Gell-Mann basis. The trace
/// component is fixed at 1/sqrt(N) and not stored.
struct CoherenceVector {
  Eigen::VectorXd varrho;
  int N = 0;

  double norm_squared() const { return varrho.squaredNorm(); }
};

CoherenceVector to_coherence(const DensityOperator& rho, const GellMannBasis& basis);

/// Reconstructs rho = I/N + sum v_a lambda_a; throws NotPositive when the
/// result leaves the positive cone (the coherence ball contains non-states
/// for N > 2).
DensityOperator from_coherence(const CoherenceVector& v, const GellMannBasis& basis);

/// The paper's distance functional d = |v1|^2 - <v1, v2>. Only a distance
/// for equal-purity pairs, and asymmetric in general; callers needing purity
/// should use DensityOperator::purity.
double distance(const CoherenceVector& v1, const CoherenceVector& v2);

/// Index sets of the touched diagonal directions (F_h) and root spaces (F_k).
struct SupportSet {
  std::set<int> F_h;
  std::set<std::pair<int, int>> F_k;

  bool intersects(const SupportSet& other) const;
  bool empty() const { return F_h.empty() && F_k.empty(); }
  int card_k() const { return static_cast<int>(F_k.size()); }
};

/// Support of a coherence vector: j in F_h iff |v_h,j| > tol, (j,l) in F_k
/// iff sqrt(v_re^2 + v_im^2) > tol.
SupportSet support(const CoherenceVector& v, const GellMannBasis& basis, double tol = 1e-9);

/// Same computation for an arbitrary coefficient vector in the basis.
SupportSet support_of_coeffs(const Eigen::VectorXd& coeffs, const GellMannBasis& basis,
                             double tol = 1e-9);

/// Hamiltonian given either by its diagonal energy levels (H_A form) or by
/// basis coefficients (general form, e.g. H_B).
struct HamiltonianSpec {
  static HamiltonianSpec diagonal(const Eigen::VectorXd& energies);
  static HamiltonianSpec coefficients(const Eigen::VectorXd& coeffs);

  bool diagonal_form = false;
  Eigen::VectorXd energies;  // N entries, zero sum (diagonal form)
  Eigen::VectorXd coeffs;    // n entries (coefficient form)

  /// Basis coefficients of the Hamiltonian; converts energies when needed.
  Eigen::VectorXd to_coeffs(const GellMannBasis& basis) const;
};

enum class Regularity { Degenerate, Regular, StronglyRegular };

/// Regular: all energy levels distinct. Strongly regular: additionally all
/// transition gaps E_j - E_l distinct across distinct ordered pairs (the
/// levels are not equispaced).
Regularity is_strongly_regular(const Eigen::VectorXd& energies, double tol = 1e-9);
Regularity is_strongly_regular(const HamiltonianSpec& hA, double tol = 1e-9);

}  // namespace qflag

#endif  // QFLAG_STATE_HPP
