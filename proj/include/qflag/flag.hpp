#ifndef QFLAG_FLAG_HPP
#define QFLAG_FLAG_HPP

#include <Eigen/Dense>
#include <vector>

#include "qflag/basis.hpp"
#include "qflag/state.hpp"

namespace qflag {

/// Isospectral-orbit classification of a density operator: eigenvalue
/// multiplicities, orbit dimension m = N^2 - sum j_i^2, Euler characteristic
/// chi = N! / prod j_i! (the number of distinct diagonal matrices on the
/// orbit).
struct FlagManifoldInfo {
  Eigen::VectorXd eigenvalues;      // sorted descending
  std::vector<int> multiplicities;  // cluster sizes, descending eigenvalue order
  int orbit_dim_m = 0;
  long long euler_chi = 0;
  double degeneracy_tol = 0.0;
};

/// Clusters the spectrum by single-linkage with gap threshold degeneracy_tol.
FlagManifoldInfo classify(const DensityOperator& rho, double degeneracy_tol = 1e-8);

/// The chi - 1 isospectral states obtained by nontrivially permuting the
/// eigenvalues in the diagonalizing frame of rho_d. Point order is
/// deterministic: lexicographic in the permuted spectrum.
struct AntipodalSet {
  std::vector<CoherenceVector> points;
  CoherenceVector base;
};

/// Throws TooLarge when chi exceeds 10! (factorial enumeration cap). For the
/// maximally mixed state the orbit is a point and the set is empty.
AntipodalSet antipodal_points(const DensityOperator& rho_d, const GellMannBasis& basis,
                              double degeneracy_tol = 1e-8);

/// Gauge-independent antipodality test: v is antipodal to rho_d iff the two
/// states are isospectral, commute, and differ. For nondegenerate spectra
/// this matches membership (within tol) in antipodal_points(rho_d); for
/// degenerate blocks it accepts the whole gauge orbit of the enumerated
/// representatives.
bool is_antipodal(const CoherenceVector& v, const DensityOperator& rho_d,
                  const GellMannBasis& basis, double tol = 1e-8);

}  // namespace qflag

#endif  // QFLAG_FLAG_HPP
