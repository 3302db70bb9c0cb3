#include "qflag/convergence.hpp"

#include <algorithm>
#include <cmath>

namespace qflag {

namespace {

constexpr double kRankThreshold = 1e-8;  // relative to the largest singular value

int rank_with_threshold(const Eigen::MatrixXd& columns) {
  if (columns.cols() == 0) return 0;
  // Krylov-type columns scale like omega^k, so equilibrate them first (rank
  // is invariant under column scaling, conditioning is not).
  Eigen::MatrixXd scaled = columns;
  for (int c = 0; c < scaled.cols(); ++c) {
    const double norm = scaled.col(c).norm();
    if (norm > 0.0) scaled.col(c) /= norm;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > kRankThreshold * sv(0)) ++rank;
  }
  return rank;
}

Eigen::VectorXd vectorize(const Eigen::MatrixXd& M) {
  return Eigen::Map<const Eigen::VectorXd>(M.data(), M.size());
}

}  // namespace

BracketChain bracket_chain(const AdjointGenerator& A, const AdjointGenerator& B, int depth,
                           bool include_A) {
  if (depth < 0) {
    throw ConfigError("bracket_chain: depth must be >= 0");
  }
  BracketChain chain;
  chain.includes_A = include_A;
  if (include_A) chain.generators.push_back(A.mat);
  chain.generators.push_back(B.mat);
  Eigen::MatrixXd current = B.mat;
  for (int k = 0; k < depth; ++k) {
    current = (A.mat * current - current * A.mat).eval();
    chain.generators.push_back(current);
  }
  Eigen::MatrixXd columns(A.mat.size(), static_cast<int>(chain.generators.size()));
  for (std::size_t i = 0; i < chain.generators.size(); ++i) {
    columns.col(static_cast<int>(i)) = vectorize(chain.generators[i]);
  }
  chain.span_dim = rank_with_threshold(columns);
  return chain;
}

int lie_closure_dim(const AdjointGenerator& A, const AdjointGenerator& B) {
  const int n = static_cast<int>(A.mat.rows());
  std::vector<Eigen::MatrixXd> basis;
  std::vector<Eigen::VectorXd> ortho;  // orthonormal vectorizations of basis

  const auto try_add = [&](const Eigen::MatrixXd& M) {
    const double scale = M.norm();
    if (scale == 0.0) return false;
    Eigen::VectorXd r = vectorize(M);
    // Modified Gram-Schmidt, twice for stability.
    for (int pass = 0; pass < 2; ++pass) {
      for (const Eigen::VectorXd& q : ortho) r -= q.dot(r) * q;
    }
    if (r.norm() <= kRankThreshold * scale) return false;
    ortho.push_back(r / r.norm());
    basis.push_back(M);
    return true;
  };

  try_add(A.mat);
  try_add(B.mat);

  const int max_sweeps = n * n;
  int stagnant_sweeps = 0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const std::size_t size_before = basis.size();
    for (std::size_t i = 0; i < size_before; ++i) {
      for (std::size_t j = i + 1; j < size_before; ++j) {
        try_add(basis[i] * basis[j] - basis[j] * basis[i]);
      }
    }
    if (basis.size() == size_before) {
      if (++stagnant_sweeps >= 2) return static_cast<int>(basis.size());
    } else {
      stagnant_sweeps = 0;
    }
  }
  throw NoConvergence("lie_closure_dim: closure did not stabilize");
}

int kalman_rank(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int m) {
  if (m < 1) {
    throw ConfigError("kalman_rank: m must be >= 1");
  }
  Eigen::MatrixXd columns(b.size(), m);
  Eigen::VectorXd current = b;
  for (int k = 0; k < m; ++k) {
    columns.col(k) = current;
    if (k + 1 < m) current = (A * current).eval();
  }
  return rank_with_threshold(columns);
}

int rank_W_at(const BracketChain& chain, const Eigen::VectorXd& v_d) {
  if (chain.generators.empty()) return 0;
  Eigen::MatrixXd columns(v_d.size(), static_cast<int>(chain.generators.size()));
  for (std::size_t i = 0; i < chain.generators.size(); ++i) {
    columns.col(static_cast<int>(i)) = chain.generators[i] * v_d;
  }
  return rank_with_threshold(columns);
}

SupportSet commutator_support(const Plant& plant, const CoherenceVector& v_d, double tol) {
  if (v_d.N != plant.levels()) {
    throw DimensionMismatch("commutator_support: dimension mismatch");
  }
  return support_of_coeffs(plant.B().mat * v_d.varrho, plant.basis(), tol);
}

bool support_intersects(const Plant& plant, const DensityOperator& rho_d,
                        const DensityOperator& rho0, double tol) {
  const CoherenceVector v_d = to_coherence(rho_d, plant.basis());
  const CoherenceVector v0 = to_coherence(rho0, plant.basis());
  return commutator_support(plant, v_d, tol).intersects(support(v0, plant.basis(), tol));
}

Lemma3Report lemma3_equivalence(const Plant& plant, const DensityOperator& rho_d,
                                double support_tol, double degeneracy_tol) {
  if (plant.regularity() != Regularity::StronglyRegular) {
    throw NotStronglyRegular("lemma3_equivalence: H_A must be strongly regular");
  }
  Lemma3Report report;
  report.m = classify(rho_d, degeneracy_tol).orbit_dim_m;

  const CoherenceVector v_d = to_coherence(rho_d, plant.basis());
  const Eigen::VectorXd b = plant.B().mat * v_d.varrho;
  report.card_Fk = commutator_support(plant, v_d, support_tol).card_k();

  report.kalman_rank_value = kalman_rank(plant.A().mat, b, std::max(report.m, 1));
  const BracketChain chain =
      bracket_chain(plant.A(), plant.B(), std::max(report.m - 1, 0));
  report.rank_W_value = rank_W_at(chain, v_d.varrho);

  report.kalman_ok = report.m > 0 && report.kalman_rank_value == report.m;
  report.rankW_ok = report.m > 0 && report.rank_W_value == report.m;
  report.cardinality_ok = report.m > 0 && 2 * report.card_Fk >= report.m;
  return report;
}

std::string to_string(VerdictOutcome outcome) {
  switch (outcome) {
    case VerdictOutcome::ExpectedConvergence:
      return "ExpectedConvergence";
    case VerdictOutcome::AntipodalObstruction:
      return "AntipodalObstruction";
    case VerdictOutcome::SupportDisjoint:
      return "SupportDisjoint";
    case VerdictOutcome::InsufficientCardinality:
      return "InsufficientCardinality";
    case VerdictOutcome::NotApplicable:
      return "NotApplicable";
  }
  return "NotApplicable";
}

Verdict theorem1_verdict(const Plant& plant, const DensityOperator& rho_d,
                         const DensityOperator& rho0, double support_tol,
                         double degeneracy_tol) {
  Verdict verdict;
  verdict.hypothesis_strongly_regular = plant.regularity() == Regularity::StronglyRegular;
  verdict.hypothesis_nearest_neighbor = plant.nearest_neighbor_coupling();

  const FlagManifoldInfo info = classify(rho_d, degeneracy_tol);
  verdict.m = info.orbit_dim_m;
  verdict.chi = info.euler_chi;

  const CoherenceVector v_d = to_coherence(rho_d, plant.basis());
  const CoherenceVector v0 = to_coherence(rho0, plant.basis());
  verdict.card_Fk_commutator = commutator_support(plant, v_d, support_tol).card_k();
  verdict.kalman_rank =
      kalman_rank(plant.A().mat, plant.B().mat * v_d.varrho, std::max(verdict.m, 1));
  verdict.lie_closure_dim = qflag::lie_closure_dim(plant.A(), plant.B());

  verdict.cond_antipodal = !is_antipodal(v0, rho_d, plant.basis());
  verdict.cond_support_intersect = support_intersects(plant, rho_d, rho0, support_tol);
  verdict.cond_cardinality = verdict.m > 0 && 2 * verdict.card_Fk_commutator >= verdict.m;

  if (!verdict.hypothesis_strongly_regular || !verdict.hypothesis_nearest_neighbor) {
    verdict.outcome = VerdictOutcome::NotApplicable;
  } else if (!verdict.cond_antipodal) {
    verdict.outcome = VerdictOutcome::AntipodalObstruction;
  } else if (!verdict.cond_support_intersect) {
    verdict.outcome = VerdictOutcome::SupportDisjoint;
  } else if (!verdict.cond_cardinality) {
    verdict.outcome = VerdictOutcome::InsufficientCardinality;
  } else {
    verdict.outcome = VerdictOutcome::ExpectedConvergence;
  }
  return verdict;
}

}  // namespace qflag
