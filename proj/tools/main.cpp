#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qflag/flag.hpp"
#include "qflag/json_io.hpp"
#include "qflag/scenario.hpp"

namespace {

using qflag::Json;

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitConfig = 2;

std::filesystem::path default_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("QFLAG_OUT_DIR")) return env;
  return ".";
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qflag::ConfigError("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw qflag::ConfigError(path + ": " + e.what());
  }
  return j;
}

qflag::Scenario load_scenario(const std::string& path, double dt_override, double T_override,
                              int stride_override) {
  qflag::Scenario s = qflag::scenario_from_json(load_json(path));
  if (s.energies_centered_on_load) {
    std::cerr << "warning: energies were centered to zero mean\n";
  }
  if (dt_override > 0) s.dt = dt_override;
  if (T_override > 0) s.T = T_override;
  if (stride_override > 0) s.record_stride = stride_override;
  return s;
}

void print_result(const qflag::Scenario& s, const qflag::ScenarioResult& result) {
  if (!result.strongly_regular) {
    std::cerr << "warning: H_A is not strongly regular\n";
  }
  std::cout << s.name << ": verdict " << qflag::to_string(result.verdict.outcome)
            << ", final V = " << result.final_V;
  if (result.converged_time) std::cout << " (converged at t = " << *result.converged_time << ")";
  std::cout << "\n  wrote " << result.verdict_path.string() << "\n  wrote "
            << result.traj_path.string() << "\n";
}

qflag::DensityOperator density_from_file(const std::string& path,
                                         const qflag::GellMannBasis& basis) {
  const Json j = load_json(path);
  qflag::DensityInput input;
  // Reuse the scenario density schema: {"matrix": ...} | {"coherence": ...} |
  // {"diagonal": ...}, with N taken from the file.
  Json wrapper = Json::object();
  wrapper["name"] = "density";
  wrapper["N"] = basis.levels();
  wrapper["energies"] = Json::array();
  for (int i = 0; i < basis.levels(); ++i) wrapper["energies"].push_back(0.0);
  wrapper["hB_terms"] = Json::array();
  wrapper["rho_d"] = j;
  wrapper["rho0"] = j;
  return qflag::scenario_from_json(wrapper).rho_d.realize(basis);
}

int detect_levels(const Json& j) {
  if (j.contains("N")) return j.at("N").get<int>();
  if (j.contains("diagonal")) return static_cast<int>(j.at("diagonal").size());
  if (j.contains("matrix")) return static_cast<int>(j.at("matrix").size());
  if (j.contains("coherence")) {
    const int n = static_cast<int>(j.at("coherence").size());
    const int N = static_cast<int>(std::lround(std::sqrt(double(n + 1))));
    if (N * N - 1 != n) throw qflag::ConfigError("coherence length is not N^2 - 1");
    return N;
  }
  throw qflag::ConfigError("density file needs 'matrix', 'coherence' or 'diagonal'");
}

Json basis_to_json(const qflag::GellMannBasis& basis) {
  Json out = Json::object();
  out["N"] = basis.levels();
  out["n"] = basis.dim();
  Json elements = Json::array();
  for (int a = 0; a < basis.dim(); ++a) {
    Json element = Json::object();
    element["label"] = qflag::to_string(basis.label(a));
    element["position"] = a;
    Json rows = Json::array();
    const Eigen::MatrixXcd& m = basis.matrix(a);
    for (int r = 0; r < m.rows(); ++r) {
      Json row = Json::array();
      for (int c = 0; c < m.cols(); ++c) {
        row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
      }
      rows.push_back(row);
    }
    element["matrix"] = rows;
    elements.push_back(element);
  }
  out["elements"] = elements;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lyapunov feedback stabilization toolkit for N-level ensembles"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir_flag;
  unsigned seed = 0;
  app.add_option("--out-dir", out_dir_flag,
                 "output directory (default: $QFLAG_OUT_DIR or '.')");
  app.add_option("--seed", seed, "seed for randomized property scenarios");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run one scenario (verdict + trajectory)");
  std::string sim_path;
  double sim_dt = 0, sim_T = 0;
  int sim_stride = 0;
  bool sim_full = false;
  simulate->add_option("scenario", sim_path, "scenario JSON file")->required();
  simulate->add_option("--dt", sim_dt, "time step override");
  simulate->add_option("--T", sim_T, "horizon override");
  simulate->add_option("--stride", sim_stride, "record stride override");
  simulate->add_flag("--no-early-stop", sim_full, "always run the full horizon");

  // verdict
  auto* verdict = app.add_subcommand("verdict", "evaluate the convergence verdict only");
  std::string verdict_path;
  verdict->add_option("scenario", verdict_path, "scenario JSON file")->required();

  // battery
  auto* battery = app.add_subcommand("battery", "run the builtin regression scenarios");
  std::string filter;
  int jobs = 0;
  battery->add_option("--filter", filter, "name glob, e.g. 'ex1-*'");
  battery->add_option("--jobs", jobs, "worker pool size (default: hardware)");

  // flag classify
  auto* flag_cmd = app.add_subcommand("flag", "flag-manifold utilities");
  flag_cmd->require_subcommand(1);
  auto* classify_cmd = flag_cmd->add_subcommand("classify", "orbit classification + antipodal set");
  std::string density_path;
  double degeneracy_tol = 1e-8;
  classify_cmd->add_option("density", density_path, "density JSON file")->required();
  classify_cmd->add_option("--degeneracy-tol", degeneracy_tol, "eigenvalue clustering threshold");

  // scenarios export
  auto* scenarios_cmd = app.add_subcommand("scenarios", "builtin scenario utilities");
  scenarios_cmd->require_subcommand(1);
  auto* export_cmd = scenarios_cmd->add_subcommand("export", "dump builtin scenarios as JSON");

  // basis dump
  auto* basis_cmd = app.add_subcommand("basis", "Gell-Mann basis utilities");
  basis_cmd->require_subcommand(1);
  auto* dump_cmd = basis_cmd->add_subcommand("dump", "print the basis as JSON");
  int dump_N = 3;
  dump_cmd->add_option("--N", dump_N, "number of levels")->required();

  CLI11_PARSE(app, argc, argv);
  (void)seed;  // reserved for randomized scenario extensions

  const std::filesystem::path out_dir = default_out_dir(out_dir_flag);
  try {
    if (*simulate) {
      const qflag::Scenario s = load_scenario(sim_path, sim_dt, sim_T, sim_stride);
      const qflag::ScenarioResult result = qflag::run_scenario(s, out_dir, !sim_full);
      print_result(s, result);
      return kExitOk;
    }
    if (*verdict) {
      const qflag::Scenario s = load_scenario(verdict_path, 0, 0, 0);
      const qflag::Plant plant = s.make_plant();
      const qflag::Verdict v =
          qflag::theorem1_verdict(plant, s.rho_d.realize(plant.basis()),
                                  s.rho0.realize(plant.basis()), s.tolerances.support_tol,
                                  s.tolerances.degeneracy_tol);
      std::cout << qflag::dump_deterministic(qflag::verdict_to_json(v));
      return kExitOk;
    }
    if (*battery) {
      const qflag::BatteryReport report = qflag::run_battery(filter, out_dir, jobs);
      for (const qflag::BatteryEntry& entry : report.entries) {
        std::cout << (entry.pass ? "PASS" : "FAIL") << "  " << entry.name << "  ["
                  << qflag::to_string(entry.got) << "]";
        if (!entry.detail.empty()) std::cout << "  " << entry.detail;
        std::cout << "\n";
      }
      std::cout << (report.all_pass ? "battery: all scenarios pass"
                                    : "battery: FAILURES present")
                << "\n";
      return report.all_pass ? kExitOk : kExitMismatch;
    }
    if (*classify_cmd) {
      const Json j = load_json(density_path);
      const int N = detect_levels(j);
      const qflag::GellMannBasis basis = qflag::GellMannBasis::build(N);
      const qflag::DensityOperator rho = density_from_file(density_path, basis);
      const qflag::FlagManifoldInfo info = qflag::classify(rho, degeneracy_tol);
      const qflag::AntipodalSet antipodal =
          qflag::antipodal_points(rho, basis, degeneracy_tol);
      Json out = Json::object();
      out["N"] = N;
      Json eig = Json::array();
      for (int i = 0; i < info.eigenvalues.size(); ++i) eig.push_back(info.eigenvalues(i));
      out["eigenvalues"] = eig;
      out["multiplicities"] = info.multiplicities;
      out["m"] = info.orbit_dim_m;
      out["chi"] = info.euler_chi;
      Json points = Json::array();
      for (const qflag::CoherenceVector& p : antipodal.points) {
        Json vec = Json::array();
        for (int i = 0; i < p.varrho.size(); ++i) vec.push_back(p.varrho(i));
        points.push_back(vec);
      }
      out["antipodal"] = points;
      std::cout << qflag::dump_deterministic(out);
      return kExitOk;
    }
    if (*export_cmd) {
      std::filesystem::create_directories(out_dir);
      for (const qflag::Scenario& s : qflag::builtin_scenarios()) {
        const std::filesystem::path path = out_dir / (s.name + ".json");
        std::ofstream file(path);
        file << qflag::dump_deterministic(qflag::scenario_to_json(s));
        std::cout << "wrote " << path.string() << "\n";
      }
      return kExitOk;
    }
    if (*dump_cmd) {
      std::cout << qflag::dump_deterministic(
          basis_to_json(qflag::GellMannBasis::build(dump_N)));
      return kExitOk;
    }
  } catch (const qflag::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qflag::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
