#ifndef QFLAG_CONVERGENCE_HPP
#define QFLAG_CONVERGENCE_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qflag/dynamics.hpp"
#include "qflag/flag.hpp"
#include "qflag/state.hpp"

namespace qflag {

/// Ad-bracket chain W^alpha = span{B, [A,B], [A,[A,B]], ...} up to the given
/// depth; optionally with A adjoined (the W_A variant).
struct BracketChain {
  std::vector<Eigen::MatrixXd> generators;
  int span_dim = 0;
  bool includes_A = false;
};

BracketChain bracket_chain(const AdjointGenerator& A, const AdjointGenerator& B, int depth,
                           bool include_A = false);

/// Dimension of the smallest matrix Lie algebra containing A and B, by
/// iterated bracket closure with rank-stagnation stop. Throws NoConvergence
/// if the closure fails to stabilize within n^2 sweeps.
int lie_closure_dim(const AdjointGenerator& A, const AdjointGenerator& B);

/// rank [b, Ab, ..., A^{m-1} b] with singular-value threshold.
int kalman_rank(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int m);

/// rank of {W v_d : W in chain generators}.
int rank_W_at(const BracketChain& chain, const Eigen::VectorXd& v_d);

/// The three equivalent local-controllability conditions at rho_d (valid
/// under strong regularity of H_A, enforced):
///   1. Kalman rank of the linearization equals m,
///   2. rank(W^{m-1} varrho_d) = m,
///   3. Card F_k([H_B, rho_d]) >= m/2.
struct Lemma3Report {
  bool kalman_ok = false;
  bool rankW_ok = false;
  bool cardinality_ok = false;
  int m = 0;
  int kalman_rank_value = 0;
  int rank_W_value = 0;
  int card_Fk = 0;
};

Lemma3Report lemma3_equivalence(const Plant& plant, const DensityOperator& rho_d,
                                double support_tol = 1e-9, double degeneracy_tol = 1e-8);

/// Support of [H_B, rho_d], computed as the support of B varrho_d.
SupportSet commutator_support(const Plant& plant, const CoherenceVector& v_d,
                              double tol = 1e-9);

/// True iff the combined (F_h and F_k) supports of [H_B, rho_d] and rho(0)
/// share an index.
bool support_intersects(const Plant& plant, const DensityOperator& rho_d,
                        const DensityOperator& rho0, double tol = 1e-9);

enum class VerdictOutcome {
  ExpectedConvergence,
  AntipodalObstruction,
  SupportDisjoint,
  InsufficientCardinality,
  NotApplicable,
};

std::string to_string(VerdictOutcome outcome);

/// Convergence verdict for (plant, rho_d, rho(0)). The condition booleans
/// state whether each requirement HOLDS; in particular cond_antipodal is true
/// when rho(0) is not antipodal to rho_d. A failed cardinality condition
/// means the test is inconclusive, not that the trajectory diverges.
struct Verdict {
  VerdictOutcome outcome = VerdictOutcome::NotApplicable;
  bool cond_antipodal = false;
  bool cond_support_intersect = false;
  bool cond_cardinality = false;
  int m = 0;
  long long chi = 0;
  int card_Fk_commutator = 0;
  int kalman_rank = 0;
  int lie_closure_dim = 0;
  bool hypothesis_strongly_regular = false;
  bool hypothesis_nearest_neighbor = false;
};

/// Requires strong regularity and nearest-neighbor coupling; otherwise the
/// outcome is NotApplicable with the hypothesis flags reporting what failed.
Verdict theorem1_verdict(const Plant& plant, const DensityOperator& rho_d,
                         const DensityOperator& rho0, double support_tol = 1e-9,
                         double degeneracy_tol = 1e-8);

}  // namespace qflag

#endif  // QFLAG_CONVERGENCE_HPP
