#ifndef QFLAG_TESTS_SUPPORT_HPP
#define QFLAG_TESTS_SUPPORT_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <vector>
#include <cmath>
#include <random>

#include "qflag/basis.hpp"
#include "qflag/state.hpp"

namespace qflag::testing {

inline Eigen::MatrixXcd elementary(int N, int j, int l) {
  Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(N, N);
  E(j - 1, l - 1) = 1.0;
  return E;
}

/// Random complex Gaussian matrix.
inline Eigen::MatrixXcd random_complex(int N, std::mt19937& rng) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXcd M(N, N);
  for (int r = 0; r < N; ++r) {
    for (int c = 0; c < N; ++c) M(r, c) = Complex(gauss(rng), gauss(rng));
  }
  return M;
}

/// Haar-ish random unitary via QR.
inline Eigen::MatrixXcd random_unitary(int N, std::mt19937& rng) {
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_complex(N, rng));
  return qr.householderQ();
}

inline Eigen::MatrixXcd random_traceless_hermitian(int N, std::mt19937& rng) {
  Eigen::MatrixXcd M = random_complex(N, rng);
  M = 0.5 * (M + M.adjoint()).eval();
  M -= (M.trace() / double(N)) * Eigen::MatrixXcd::Identity(N, N);
  return M;
}

/// Random density with a generic (all-distinct, strictly positive) spectrum.
inline Eigen::MatrixXcd random_density(int N, std::mt19937& rng) {
  std::exponential_distribution<double> expo(1.0);
  Eigen::VectorXd w(N);
  for (int i = 0; i < N; ++i) w(i) = expo(rng) + 1e-3;
  w /= w.sum();
  const Eigen::MatrixXcd U = random_unitary(N, rng);
  return U * w.cast<Complex>().asDiagonal() * U.adjoint();
}

/// Probability spectrum with well-separated entries (gap >= 0.04), sorted
/// descending. Keeps tolerance-based rank tests away from orbit-stratum
/// boundaries.
inline std::vector<double> random_separated_spectrum(int N, std::mt19937& rng) {
  std::uniform_real_distribution<double> uniform(0.05, 1.0);
  while (true) {
    std::vector<double> w(N);
    double total = 0.0;
    for (double& x : w) {
      x = uniform(rng);
      total += x;
    }
    for (double& x : w) x /= total;
    std::sort(w.begin(), w.end(), std::greater<double>());
    bool separated = true;
    for (int i = 0; i + 1 < N; ++i) {
      if (w[i] - w[i + 1] < 0.04) separated = false;
    }
    if (separated) return w;
  }
}

/// Zero-sum energies with all distinct pairwise gaps.
inline Eigen::VectorXd random_strongly_regular_energies(int N, std::mt19937& rng) {
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  while (true) {
    Eigen::VectorXd e(N);
    for (int i = 0; i < N; ++i) e(i) = uniform(rng);
    e.array() -= e.mean();
    if (is_strongly_regular(e, 1e-3) == Regularity::StronglyRegular) return e;
  }
}

/// Random off-diagonal coefficient vector with every root space coupled.
inline Eigen::VectorXd random_full_hB(const GellMannBasis& basis, std::mt19937& rng) {
  std::uniform_real_distribution<double> uniform(0.2, 1.0);
  std::uniform_real_distribution<double> sign(-1.0, 1.0);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(basis.dim());
  for (int a = 0; a < basis.dim(); ++a) {
    if (basis.label(a).kind != LabelKind::Diag) {
      h(a) = uniform(rng) * (sign(rng) > 0 ? 1.0 : -1.0);
    }
  }
  return h;
}

}  // namespace qflag::testing

#endif  // QFLAG_TESTS_SUPPORT_HPP
