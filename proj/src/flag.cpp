#include "qflag/flag.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qflag {

namespace {

constexpr long long kChiCap = 3628800;  // 10!

long long factorial(int k) {
  long long f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Eigenvalues replaced by their cluster means, descending, plus cluster sizes.
struct ClusteredSpectrum {
  Eigen::VectorXd values;  // descending, equal within a cluster
  std::vector<int> multiplicities;
};

ClusteredSpectrum cluster_spectrum(const Eigen::VectorXd& sorted_desc, double tol) {
  const int N = static_cast<int>(sorted_desc.size());
  ClusteredSpectrum out;
  out.values.resize(N);
  int start = 0;
  while (start < N) {
    int end = start + 1;
    while (end < N && sorted_desc(end - 1) - sorted_desc(end) <= tol) ++end;
    const double mean = sorted_desc.segment(start, end - start).mean();
    for (int i = start; i < end; ++i) out.values(i) = mean;
    out.multiplicities.push_back(end - start);
    start = end;
  }
  return out;
}

}  // namespace

FlagManifoldInfo classify(const DensityOperator& rho, double degeneracy_tol) {
  FlagManifoldInfo info;
  info.degeneracy_tol = degeneracy_tol;
  info.eigenvalues = rho.sorted_eigenvalues();
  const ClusteredSpectrum clustered = cluster_spectrum(info.eigenvalues, degeneracy_tol);
  info.multiplicities = clustered.multiplicities;

  const int N = rho.levels();
  int sum_sq = 0;
  long long chi = factorial(N);
  for (int mult : info.multiplicities) {
    sum_sq += mult * mult;
    chi /= factorial(mult);
  }
  info.orbit_dim_m = N * N - sum_sq;
  info.euler_chi = chi;
  return info;
}

AntipodalSet antipodal_points(const DensityOperator& rho_d, const GellMannBasis& basis,
                              double degeneracy_tol) {
  if (rho_d.levels() != basis.levels()) {
    throw DimensionMismatch("antipodal_points: density and basis dimension differ");
  }
  const FlagManifoldInfo info = classify(rho_d, degeneracy_tol);
  if (info.euler_chi > kChiCap) {
    throw TooLarge("antipodal_points: chi = " + std::to_string(info.euler_chi) +
                   " exceeds the enumeration cap 10!");
  }

  const int N = rho_d.levels();
  const ClusteredSpectrum clustered = cluster_spectrum(info.eigenvalues, degeneracy_tol);
  const Eigen::VectorXd& w = clustered.values;  // descending cluster means

  // Diagonalizing frame. Exactly diagonal inputs keep the computational
  // basis (sorted by eigenvalue) so the diagonal permutation states come out
  // bit-exact.
  Eigen::MatrixXcd R(N, N);
  const double offdiag = (rho_d.matrix() - rho_d.matrix().diagonal().asDiagonal().toDenseMatrix())
                             .cwiseAbs()
                             .maxCoeff();
  if (offdiag < 1e-12) {
    std::vector<int> order(N);
    std::iota(order.begin(), order.end(), 0);
    const Eigen::MatrixXcd& m = rho_d.matrix();
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return m(a, a).real() > m(b, b).real(); });
    R.setZero();
    for (int k = 0; k < N; ++k) R(order[k], k) = 1.0;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho_d.matrix());
    // Solver returns ascending order; flip to descending.
    for (int k = 0; k < N; ++k) R.col(k) = solver.eigenvectors().col(N - 1 - k);
  }

  AntipodalSet set;
  set.base = to_coherence(rho_d, basis);

  // Distinct arrangements of the eigenvalue multiset in lexicographic order;
  // the base arrangement w is skipped.
  Eigen::VectorXd arrangement = w;
  std::sort(arrangement.data(), arrangement.data() + N);
  do {
    if (arrangement == w) continue;
    const Eigen::MatrixXcd permuted =
        R * arrangement.cast<Complex>().asDiagonal() * R.adjoint();
    // Symmetrize away conjugation roundoff before validating.
    const Eigen::MatrixXcd clean = 0.5 * (permuted + permuted.adjoint());
    set.points.push_back(to_coherence(DensityOperator::from_matrix(clean), basis));
  } while (std::next_permutation(arrangement.data(), arrangement.data() + N));

  return set;
}

bool is_antipodal(const CoherenceVector& v, const DensityOperator& rho_d,
                  const GellMannBasis& basis, double tol) {
  if (v.N != rho_d.levels()) {
    throw DimensionMismatch("is_antipodal: dimensions differ");
  }
  Eigen::MatrixXcd rho_v;
  try {
    rho_v = from_coherence(v, basis).matrix();
  } catch (const NotPositive&) {
    return false;
  }
  const Eigen::MatrixXcd& rd = rho_d.matrix();

  const Eigen::VectorXd wv = DensityOperator::from_matrix(rho_v).sorted_eigenvalues();
  const Eigen::VectorXd wd = rho_d.sorted_eigenvalues();
  if ((wv - wd).cwiseAbs().maxCoeff() > tol) return false;

  const double comm = (rho_v * rd - rd * rho_v).cwiseAbs().maxCoeff();
  if (comm > tol) return false;

  const CoherenceVector base = to_coherence(rho_d, basis);
  return (v.varrho - base.varrho).norm() > tol;
}

}  // namespace qflag
