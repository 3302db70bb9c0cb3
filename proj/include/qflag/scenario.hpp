#ifndef QFLAG_SCENARIO_HPP
#define QFLAG_SCENARIO_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qflag/convergence.hpp"
#include "qflag/dynamics.hpp"
#include "qflag/json_io.hpp"

namespace qflag {

struct Tolerances {
  double support_tol = 1e-9;
  double convergence_V = 1e-6;
  double degeneracy_tol = 1e-8;
};

struct HBTerm {
  LabelKind kind = LabelKind::OffRe;  // OffRe or OffIm only
  int j = 0;
  int l = 0;
  double value = 0.0;
};

/// Density given as a full matrix, a coherence vector, or a diagonal.
struct DensityInput {
  enum class Form { Matrix, Coherence, Diagonal };
  Form form = Form::Diagonal;
  Eigen::MatrixXcd matrix;  // Form::Matrix
  Eigen::VectorXd values;   // coherence (n entries) or diagonal (N entries)

  DensityOperator realize(const GellMannBasis& basis) const;
};

enum class ExpectedBehavior { None, ConvergesBelowTol, ControlSilent };

struct Expectation {
  VerdictOutcome outcome = VerdictOutcome::NotApplicable;
  ExpectedBehavior behavior = ExpectedBehavior::None;
};

struct Scenario {
  std::string name;
  int N = 2;
  Eigen::VectorXd energies;
  std::optional<Eigen::VectorXd> reference_energies;  // must equal energies if set
  std::vector<HBTerm> hB_terms;
  DensityInput rho_d;
  DensityInput rho0;
  double dt = 1e-3;
  double T = 20.0;
  Tolerances tolerances;
  int record_stride = 1;
  std::optional<Expectation> expected;
  bool energies_centered_on_load = false;

  Plant make_plant() const;
  Eigen::VectorXd hB_coeffs(const GellMannBasis& basis) const;
};

/// Throws ConfigError with a field-level message on malformed input.
/// Energies are centered to zero mean on load (warn flag set if adjusted).
Scenario scenario_from_json(const Json& j);
Json scenario_to_json(const Scenario& s);

Json verdict_to_json(const Verdict& verdict);

struct ScenarioResult {
  Verdict verdict;
  double final_V = 0.0;
  double max_abs_u = 0.0;
  double max_V_deviation = 0.0;  // max |V(t) - V(0)| over recorded samples
  std::optional<double> converged_time;
  bool strongly_regular = true;
  std::filesystem::path verdict_path;
  std::filesystem::path traj_path;
};

/// Runs verdict + simulation and writes <name>.verdict.json and
/// <name>.traj.csv into out_dir (atomically, temp + rename).
ScenarioResult run_scenario(const Scenario& s, const std::filesystem::path& out_dir,
                            bool stop_on_convergence = true);

/// Builtin regression scenarios: the N = 2, 3 (and one N = 4) case matrix with
/// both control-Hamiltonian variants, diagonal / off-diagonal references,
/// antipodal starts and the blocked / support-disjoint configurations.
const std::vector<Scenario>& builtin_scenarios();

struct BatteryEntry {
  std::string name;
  bool pass = false;
  VerdictOutcome expected = VerdictOutcome::NotApplicable;
  VerdictOutcome got = VerdictOutcome::NotApplicable;
  std::string detail;
};

struct BatteryReport {
  std::vector<BatteryEntry> entries;
  bool all_pass = false;
};

/// Runs every builtin scenario matching the glob filter ('*' and '?'
/// wildcards; empty string matches all) in a worker pool and checks each
/// outcome (and expected behavior) against its expectation. Throws
/// ConfigError when the filter matches nothing.
BatteryReport run_battery(const std::string& filter, const std::filesystem::path& out_dir,
                          int workers = 0);

}  // namespace qflag

#endif  // QFLAG_SCENARIO_HPP
