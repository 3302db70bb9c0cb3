#include "qflag/scenario.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

namespace qflag {

namespace {

std::string behavior_name(ExpectedBehavior b) {
  switch (b) {
    case ExpectedBehavior::None:
      return "none";
    case ExpectedBehavior::ConvergesBelowTol:
      return "converges";
    case ExpectedBehavior::ControlSilent:
      return "control-silent";
  }
  return "none";
}

ExpectedBehavior behavior_from_name(const std::string& name) {
  if (name == "none") return ExpectedBehavior::None;
  if (name == "converges") return ExpectedBehavior::ConvergesBelowTol;
  if (name == "control-silent") return ExpectedBehavior::ControlSilent;
  throw ConfigError("expected.behavior: unknown value '" + name + "'");
}

VerdictOutcome outcome_from_name(const std::string& name) {
  for (VerdictOutcome o :
       {VerdictOutcome::ExpectedConvergence, VerdictOutcome::AntipodalObstruction,
        VerdictOutcome::SupportDisjoint, VerdictOutcome::InsufficientCardinality,
        VerdictOutcome::NotApplicable}) {
    if (to_string(o) == name) return o;
  }
  throw ConfigError("expected.outcome: unknown value '" + name + "'");
}

Eigen::VectorXd vector_from_json(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field + ": expected an array of numbers");
  Eigen::VectorXd v(j.size());
  int i = 0;
  for (const auto& x : j) {
    if (!x.is_number()) throw ConfigError(field + ": expected an array of numbers");
    v(i++) = x.get<double>();
  }
  return v;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

DensityInput density_from_json(const Json& j, int N, const std::string& field) {
  if (!j.is_object()) {
    throw ConfigError(field + ": expected an object with 'matrix', 'coherence' or 'diagonal'");
  }
  const int forms = int(j.contains("matrix")) + int(j.contains("coherence")) +
                    int(j.contains("diagonal"));
  if (forms != 1) {
    throw ConfigError(field + ": exactly one of 'matrix', 'coherence', 'diagonal' required");
  }
  DensityInput input;
  if (j.contains("diagonal")) {
    input.form = DensityInput::Form::Diagonal;
    input.values = vector_from_json(j.at("diagonal"), field + ".diagonal");
    if (input.values.size() != N) {
      throw ConfigError(field + ".diagonal: expected " + std::to_string(N) + " entries");
    }
  } else if (j.contains("coherence")) {
    input.form = DensityInput::Form::Coherence;
    input.values = vector_from_json(j.at("coherence"), field + ".coherence");
    if (input.values.size() != N * N - 1) {
      throw ConfigError(field + ".coherence: expected " + std::to_string(N * N - 1) +
                        " entries");
    }
  } else {
    input.form = DensityInput::Form::Matrix;
    const Json& rows = j.at("matrix");
    if (!rows.is_array() || static_cast<int>(rows.size()) != N) {
      throw ConfigError(field + ".matrix: expected " + std::to_string(N) + " rows");
    }
    input.matrix.resize(N, N);
    for (int r = 0; r < N; ++r) {
      const Json& row = rows.at(r);
      if (!row.is_array() || static_cast<int>(row.size()) != N) {
        throw ConfigError(field + ".matrix: row " + std::to_string(r) + " must have " +
                          std::to_string(N) + " [re, im] pairs");
      }
      for (int c = 0; c < N; ++c) {
        const Json& entry = row.at(c);
        if (!entry.is_array() || entry.size() != 2) {
          throw ConfigError(field + ".matrix: entries must be [re, im] pairs");
        }
        input.matrix(r, c) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
      }
    }
  }
  return input;
}

Json density_to_json(const DensityInput& input) {
  Json out = Json::object();
  switch (input.form) {
    case DensityInput::Form::Diagonal:
      out["diagonal"] = vector_to_json(input.values);
      break;
    case DensityInput::Form::Coherence:
      out["coherence"] = vector_to_json(input.values);
      break;
    case DensityInput::Form::Matrix: {
      Json rows = Json::array();
      for (int r = 0; r < input.matrix.rows(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < input.matrix.cols(); ++c) {
          row.push_back(Json::array({input.matrix(r, c).real(), input.matrix(r, c).imag()}));
        }
        rows.push_back(row);
      }
      out["matrix"] = rows;
      break;
    }
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::regex glob_to_regex(const std::string& glob) {
  std::string pattern;
  for (char c : glob) {
    if (c == '*') {
      pattern += ".*";
    } else if (c == '?') {
      pattern += '.';
    } else if (std::isalnum(static_cast<unsigned char>(c))) {
      pattern += c;
    } else {
      pattern += '\\';
      pattern += c;
    }
  }
  return std::regex(pattern);
}

}  // namespace

DensityOperator DensityInput::realize(const GellMannBasis& basis) const {
  switch (form) {
    case Form::Matrix:
      return DensityOperator::from_matrix(matrix);
    case Form::Coherence: {
      CoherenceVector v;
      v.N = basis.levels();
      v.varrho = values;
      return from_coherence(v, basis);
    }
    case Form::Diagonal: {
      Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(basis.levels(), basis.levels());
      for (int i = 0; i < values.size(); ++i) rho(i, i) = values(i);
      return DensityOperator::from_matrix(rho);
    }
  }
  throw ConfigError("DensityInput: unknown form");
}

Eigen::VectorXd Scenario::hB_coeffs(const GellMannBasis& basis) const {
  Eigen::VectorXd h = Eigen::VectorXd::Zero(basis.dim());
  for (const HBTerm& term : hB_terms) {
    h(basis.position(term.kind, term.j, term.l)) += term.value;
  }
  return h;
}

Plant Scenario::make_plant() const {
  const GellMannBasis basis = GellMannBasis::build(N);
  return Plant(N, energies, hB_coeffs(basis));
}

Scenario scenario_from_json(const Json& j) {
  Scenario s;
  try {
    s.name = j.at("name").get<std::string>();
  } catch (const Json::exception&) {
    throw ConfigError("name: required string field");
  }
  if (!j.contains("N") || !j.at("N").is_number_integer()) {
    throw ConfigError("N: required integer field");
  }
  s.N = j.at("N").get<int>();
  if (s.N < 2 || s.N > 12) throw ConfigError("N: must be in [2, 12]");

  if (!j.contains("energies")) throw ConfigError("energies: required field");
  s.energies = vector_from_json(j.at("energies"), "energies");
  if (s.energies.size() != s.N) {
    throw ConfigError("energies: expected " + std::to_string(s.N) + " entries");
  }
  const double mean = s.energies.mean();
  if (std::abs(s.energies.sum()) > 1e-12) {
    s.energies.array() -= mean;
    s.energies_centered_on_load = true;
  }
  if (j.contains("reference_energies")) {
    s.reference_energies = vector_from_json(j.at("reference_energies"), "reference_energies");
  }

  if (!j.contains("hB_terms") || !j.at("hB_terms").is_array()) {
    throw ConfigError("hB_terms: required array field");
  }
  for (const auto& t : j.at("hB_terms")) {
    HBTerm term;
    const std::string kind = t.at("kind").get<std::string>();
    if (kind == "re") {
      term.kind = LabelKind::OffRe;
    } else if (kind == "im") {
      term.kind = LabelKind::OffIm;
    } else {
      throw ConfigError("hB_terms.kind: must be 're' or 'im'");
    }
    term.j = t.at("j").get<int>();
    term.l = t.at("l").get<int>();
    term.value = t.at("value").get<double>();
    if (term.j < 1 || term.j >= term.l || term.l > s.N) {
      throw ConfigError("hB_terms: invalid slot (" + std::to_string(term.j) + "," +
                        std::to_string(term.l) + ") for N=" + std::to_string(s.N));
    }
    s.hB_terms.push_back(term);
  }

  s.rho_d = density_from_json(j.at("rho_d"), s.N, "rho_d");
  s.rho0 = density_from_json(j.at("rho0"), s.N, "rho0");

  if (j.contains("dt")) s.dt = j.at("dt").get<double>();
  if (j.contains("T")) s.T = j.at("T").get<double>();
  if (s.dt <= 0.0) throw ConfigError("dt: must be positive");
  if (s.T < s.dt) throw ConfigError("T: must be >= dt");
  if (j.contains("record_stride")) s.record_stride = j.at("record_stride").get<int>();
  if (s.record_stride < 1) throw ConfigError("record_stride: must be >= 1");

  if (j.contains("tolerances")) {
    const Json& tol = j.at("tolerances");
    if (tol.contains("support_tol")) s.tolerances.support_tol = tol.at("support_tol").get<double>();
    if (tol.contains("convergence_V")) {
      s.tolerances.convergence_V = tol.at("convergence_V").get<double>();
    }
    if (tol.contains("degeneracy_tol")) {
      s.tolerances.degeneracy_tol = tol.at("degeneracy_tol").get<double>();
    }
    if (s.tolerances.support_tol <= 0 || s.tolerances.convergence_V <= 0 ||
        s.tolerances.degeneracy_tol <= 0) {
      throw ConfigError("tolerances: must be positive");
    }
  }

  if (j.contains("expected")) {
    Expectation e;
    e.outcome = outcome_from_name(j.at("expected").at("outcome").get<std::string>());
    if (j.at("expected").contains("behavior")) {
      e.behavior = behavior_from_name(j.at("expected").at("behavior").get<std::string>());
    }
    s.expected = e;
  }
  return s;
}

Json scenario_to_json(const Scenario& s) {
  Json j = Json::object();
  j["name"] = s.name;
  j["N"] = s.N;
  j["energies"] = vector_to_json(s.energies);
  if (s.reference_energies) j["reference_energies"] = vector_to_json(*s.reference_energies);
  Json terms = Json::array();
  for (const HBTerm& t : s.hB_terms) {
    Json term = Json::object();
    term["kind"] = t.kind == LabelKind::OffRe ? "re" : "im";
    term["j"] = t.j;
    term["l"] = t.l;
    term["value"] = t.value;
    terms.push_back(term);
  }
  j["hB_terms"] = terms;
  j["rho_d"] = density_to_json(s.rho_d);
  j["rho0"] = density_to_json(s.rho0);
  j["dt"] = s.dt;
  j["T"] = s.T;
  Json tol = Json::object();
  tol["support_tol"] = s.tolerances.support_tol;
  tol["convergence_V"] = s.tolerances.convergence_V;
  tol["degeneracy_tol"] = s.tolerances.degeneracy_tol;
  j["tolerances"] = tol;
  j["record_stride"] = s.record_stride;
  if (s.expected) {
    Json e = Json::object();
    e["outcome"] = to_string(s.expected->outcome);
    e["behavior"] = behavior_name(s.expected->behavior);
    j["expected"] = e;
  }
  return j;
}

Json verdict_to_json(const Verdict& v) {
  Json j = Json::object();
  j["outcome"] = to_string(v.outcome);
  j["cond_antipodal"] = v.cond_antipodal;
  j["cond_support_intersect"] = v.cond_support_intersect;
  j["cond_cardinality"] = v.cond_cardinality;
  j["m"] = v.m;
  j["chi"] = v.chi;
  j["card_Fk_commutator"] = v.card_Fk_commutator;
  j["kalman_rank"] = v.kalman_rank;
  j["lie_closure_dim"] = v.lie_closure_dim;
  j["hypothesis_strongly_regular"] = v.hypothesis_strongly_regular;
  j["hypothesis_nearest_neighbor"] = v.hypothesis_nearest_neighbor;
  return j;
}

ScenarioResult run_scenario(const Scenario& s, const std::filesystem::path& out_dir,
                            bool stop_on_convergence) {
  if (s.reference_energies &&
      (s.reference_energies->size() != s.energies.size() ||
       (*s.reference_energies - s.energies).cwiseAbs().maxCoeff() > 1e-12)) {
    throw ConfigError("reference_energies: the reference drift must equal the plant drift");
  }
  const Plant plant = s.make_plant();
  const DensityOperator rho_d = s.rho_d.realize(plant.basis());
  const DensityOperator rho0 = s.rho0.realize(plant.basis());

  ScenarioResult result;
  result.verdict =
      theorem1_verdict(plant, rho_d, rho0, s.tolerances.support_tol, s.tolerances.degeneracy_tol);

  SimulateOptions options;
  options.dt = s.dt;
  options.T = s.T;
  options.record_stride = s.record_stride;
  options.convergence_V = s.tolerances.convergence_V;
  options.stop_on_convergence = stop_on_convergence;
  const TrajectoryRecord traj = simulate_closed_loop(plant, rho_d, rho0, options);

  result.final_V = traj.final_V();
  result.max_abs_u = traj.max_abs_control_all;
  result.max_V_deviation = traj.max_V_deviation;
  result.converged_time = traj.converged_time;
  result.strongly_regular = traj.strongly_regular;

  std::filesystem::create_directories(out_dir);
  result.verdict_path = out_dir / (s.name + ".verdict.json");
  write_file_atomic(result.verdict_path, dump_deterministic(verdict_to_json(result.verdict)));

  std::ostringstream csv;
  write_trajectory_csv(traj, csv);
  result.traj_path = out_dir / (s.name + ".traj.csv");
  write_file_atomic(result.traj_path, csv.str());
  return result;
}

BatteryReport run_battery(const std::string& filter, const std::filesystem::path& out_dir,
                          int workers) {
  const std::vector<Scenario>& all = builtin_scenarios();
  std::vector<const Scenario*> selected;
  const std::regex re = glob_to_regex(filter.empty() ? "*" : filter);
  for (const Scenario& s : all) {
    if (std::regex_match(s.name, re)) selected.push_back(&s);
  }
  if (selected.empty()) {
    throw ConfigError("battery: no builtin scenario matches filter '" + filter + "'");
  }

  BatteryReport report;
  report.entries.resize(selected.size());
  std::atomic<std::size_t> next{0};
  const int pool = workers > 0
                       ? workers
                       : std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                         selected.size()));

  const auto work = [&]() {
    for (std::size_t i = next.fetch_add(1); i < selected.size(); i = next.fetch_add(1)) {
      const Scenario& s = *selected[i];
      BatteryEntry entry;
      entry.name = s.name;
      try {
        const ScenarioResult result = run_scenario(s, out_dir);
        entry.got = result.verdict.outcome;
        if (!s.expected) {
          entry.pass = true;
          entry.detail = "no expectation";
        } else {
          entry.expected = s.expected->outcome;
          entry.pass = result.verdict.outcome == s.expected->outcome;
          std::ostringstream detail;
          if (!entry.pass) {
            detail << "outcome " << to_string(entry.got) << " != expected "
                   << to_string(entry.expected);
          }
          switch (s.expected->behavior) {
            case ExpectedBehavior::ConvergesBelowTol:
              if (!(result.converged_time || result.final_V < s.tolerances.convergence_V)) {
                entry.pass = false;
                detail << (detail.str().empty() ? "" : "; ") << "final V = " << result.final_V
                       << " did not reach " << s.tolerances.convergence_V;
              }
              break;
            case ExpectedBehavior::ControlSilent:
              if (result.max_abs_u >= 1e-9 || result.max_V_deviation >= 1e-8) {
                entry.pass = false;
                detail << (detail.str().empty() ? "" : "; ") << "max|u| = " << result.max_abs_u
                       << ", max|V - V0| = " << result.max_V_deviation;
              }
              break;
            case ExpectedBehavior::None:
              break;
          }
          entry.detail = detail.str();
        }
      } catch (const std::exception& e) {
        entry.pass = false;
        entry.detail = std::string("error: ") + e.what();
      }
      report.entries[i] = std::move(entry);
    }
  };

  std::vector<std::thread> threads;
  for (int i = 0; i < pool; ++i) threads.emplace_back(work);
  for (std::thread& t : threads) t.join();

  report.all_pass = true;
  for (const BatteryEntry& entry : report.entries) {
    if (!entry.pass) report.all_pass = false;
  }
  return report;
}

}  // namespace qflag
