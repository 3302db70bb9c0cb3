#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qflag/convergence.hpp"
#include "qflag/dynamics.hpp"
#include "qflag/flag.hpp"
#include "qflag/scenario.hpp"

namespace py = pybind11;
using namespace qflag;

namespace {

std::string kind_name(LabelKind kind) {
  switch (kind) {
    case LabelKind::Diag:
      return "h";
    case LabelKind::OffRe:
      return "re";
    case LabelKind::OffIm:
      return "im";
  }
  return "?";
}

LabelKind kind_from_name(const std::string& name) {
  if (name == "h") return LabelKind::Diag;
  if (name == "re") return LabelKind::OffRe;
  if (name == "im") return LabelKind::OffIm;
  throw ConfigError("label kind must be 'h', 're' or 'im'");
}

CoherenceVector as_coherence(const Eigen::VectorXd& v, int N) {
  CoherenceVector c;
  c.N = N;
  c.varrho = v;
  return c;
}

std::string regularity_name(Regularity r) {
  switch (r) {
    case Regularity::Degenerate:
      return "degenerate";
    case Regularity::Regular:
      return "regular";
    case Regularity::StronglyRegular:
      return "strongly_regular";
  }
  return "?";
}

Eigen::MatrixXd stack_rows(const std::vector<Eigen::VectorXd>& rows) {
  if (rows.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd out(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<int>(i)) = rows[i];
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lyapunov feedback stabilization of N-level ensembles on flag manifolds";

  const auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidDensity>(m, "InvalidDensity", error);
  py::register_exception<NotPositive>(m, "NotPositive", error);
  py::register_exception<ConfigError>(m, "ConfigError", error);
  py::register_exception<DimensionError>(m, "DimensionError", error);

  py::class_<GellMannBasis>(m, "Basis")
      .def(py::init([](int N) { return GellMannBasis::build(N); }), py::arg("N"))
      .def_property_readonly("levels", &GellMannBasis::levels)
      .def_property_readonly("dim", &GellMannBasis::dim)
      .def_property_readonly("lambda0", &GellMannBasis::lambda0)
      .def("matrix", &GellMannBasis::matrix, py::arg("position"))
      .def("matrices", &GellMannBasis::matrices)
      .def("labels",
           [](const GellMannBasis& basis) {
             std::vector<std::tuple<std::string, int, int>> out;
             for (const BasisLabel& label : basis.labels()) {
               out.emplace_back(kind_name(label.kind), label.j, label.l);
             }
             return out;
           })
      .def(
          "position",
          [](const GellMannBasis& basis, const std::string& kind, int j, int l) {
            return basis.position(kind_from_name(kind), j, l);
          },
          py::arg("kind"), py::arg("j"), py::arg("l") = 0)
      .def("__repr__", [](const GellMannBasis& basis) {
        return "<Basis N=" + std::to_string(basis.levels()) + ">";
      });

  m.def(
      "to_coherence",
      [](const Eigen::MatrixXcd& rho, const GellMannBasis& basis) {
        return to_coherence(DensityOperator::from_matrix(rho), basis).varrho;
      },
      py::arg("rho"), py::arg("basis"));
  m.def(
      "from_coherence",
      [](const Eigen::VectorXd& v, const GellMannBasis& basis) {
        return from_coherence(as_coherence(v, basis.levels()), basis).matrix();
      },
      py::arg("v"), py::arg("basis"));
  m.def(
      "distance",
      [](const Eigen::VectorXd& v1, const Eigen::VectorXd& v2) {
        return v1.squaredNorm() - v1.dot(v2);
      },
      py::arg("v1"), py::arg("v2"));
  m.def(
      "support",
      [](const Eigen::VectorXd& v, const GellMannBasis& basis, double tol) {
        const SupportSet s = support_of_coeffs(v, basis, tol);
        return py::make_tuple(std::vector<int>(s.F_h.begin(), s.F_h.end()),
                              std::vector<std::pair<int, int>>(s.F_k.begin(), s.F_k.end()));
      },
      py::arg("v"), py::arg("basis"), py::arg("tol") = 1e-9);
  m.def(
      "is_strongly_regular",
      [](const Eigen::VectorXd& energies, double tol) {
        return regularity_name(is_strongly_regular(energies, tol));
      },
      py::arg("energies"), py::arg("tol") = 1e-9);
  m.def(
      "adjoint_matrix",
      [](const Eigen::VectorXd& h, const GellMannBasis& basis) {
        return adjoint_matrix(h, basis).mat;
      },
      py::arg("h"), py::arg("basis"));
  m.def(
      "expand_in_basis",
      [](const Eigen::MatrixXcd& M, const GellMannBasis& basis, bool hermitian) {
        return expand_in_basis(
            M, basis, hermitian ? MatrixConvention::Hermitian : MatrixConvention::AntiHermitian);
      },
      py::arg("M"), py::arg("basis"), py::arg("hermitian") = true);

  py::class_<FlagManifoldInfo>(m, "FlagInfo")
      .def_readonly("eigenvalues", &FlagManifoldInfo::eigenvalues)
      .def_readonly("multiplicities", &FlagManifoldInfo::multiplicities)
      .def_readonly("m", &FlagManifoldInfo::orbit_dim_m)
      .def_readonly("chi", &FlagManifoldInfo::euler_chi)
      .def("__repr__", [](const FlagManifoldInfo& info) {
        return "<FlagInfo m=" + std::to_string(info.orbit_dim_m) +
               " chi=" + std::to_string(info.euler_chi) + ">";
      });

  m.def(
      "classify",
      [](const Eigen::MatrixXcd& rho, double degeneracy_tol) {
        return classify(DensityOperator::from_matrix(rho), degeneracy_tol);
      },
      py::arg("rho"), py::arg("degeneracy_tol") = 1e-8);
  m.def(
      "antipodal_points",
      [](const Eigen::MatrixXcd& rho, const GellMannBasis& basis, double degeneracy_tol) {
        std::vector<Eigen::VectorXd> out;
        for (const CoherenceVector& p :
             antipodal_points(DensityOperator::from_matrix(rho), basis, degeneracy_tol).points) {
          out.push_back(p.varrho);
        }
        return out;
      },
      py::arg("rho"), py::arg("basis"), py::arg("degeneracy_tol") = 1e-8);
  m.def(
      "is_antipodal",
      [](const Eigen::VectorXd& v, const Eigen::MatrixXcd& rho_d, const GellMannBasis& basis,
         double tol) {
        return is_antipodal(as_coherence(v, basis.levels()),
                            DensityOperator::from_matrix(rho_d), basis, tol);
      },
      py::arg("v"), py::arg("rho_d"), py::arg("basis"), py::arg("tol") = 1e-8);

  py::class_<Plant>(m, "Plant")
      .def(py::init([](const Eigen::VectorXd& energies, const Eigen::VectorXd& hB) {
             return Plant(static_cast<int>(energies.size()), energies, hB);
           }),
           py::arg("energies"), py::arg("hB_coeffs"))
      .def_property_readonly("basis", &Plant::basis, py::return_value_policy::reference_internal)
      .def_property_readonly("A", [](const Plant& p) { return p.A().mat; })
      .def_property_readonly("B", [](const Plant& p) { return p.B().mat; })
      .def_property_readonly("energies", &Plant::energies)
      .def_property_readonly("nearest_neighbor_coupling", &Plant::nearest_neighbor_coupling)
      .def_property_readonly(
          "regularity", [](const Plant& p) { return regularity_name(p.regularity()); });

  m.def(
      "feedback_u",
      [](const Plant& plant, const Eigen::VectorXd& v_d, const Eigen::VectorXd& v) {
        return feedback_u(as_coherence(v_d, plant.levels()), as_coherence(v, plant.levels()),
                          plant.B());
      },
      py::arg("plant"), py::arg("v_d"), py::arg("v"));
  m.def(
      "lyapunov_V",
      [](const Eigen::VectorXd& v_d, const Eigen::VectorXd& v) {
        return v.squaredNorm() - v_d.dot(v);
      },
      py::arg("v_d"), py::arg("v"));
  m.def(
      "reference_orbit",
      [](const Plant& plant, const Eigen::VectorXd& v_d0, double t) {
        return reference_orbit(as_coherence(v_d0, plant.levels()), plant, t).varrho;
      },
      py::arg("plant"), py::arg("v_d0"), py::arg("t"));

  py::class_<TrajectoryRecord>(m, "Trajectory")
      .def_property_readonly("times",
                             [](const TrajectoryRecord& t) {
                               return Eigen::Map<const Eigen::VectorXd>(t.times.data(),
                                                                        t.times.size());
                             })
      .def_property_readonly("states",
                             [](const TrajectoryRecord& t) { return stack_rows(t.states); })
      .def_property_readonly("reference",
                             [](const TrajectoryRecord& t) { return stack_rows(t.reference); })
      .def_property_readonly("control",
                             [](const TrajectoryRecord& t) {
                               return Eigen::Map<const Eigen::VectorXd>(t.control.data(),
                                                                        t.control.size());
                             })
      .def_property_readonly("lyapunov",
                             [](const TrajectoryRecord& t) {
                               return Eigen::Map<const Eigen::VectorXd>(t.lyapunov.data(),
                                                                        t.lyapunov.size());
                             })
      .def_property_readonly("eig_drift",
                             [](const TrajectoryRecord& t) {
                               return Eigen::Map<const Eigen::VectorXd>(t.eig_drift.data(),
                                                                        t.eig_drift.size());
                             })
      .def_readonly("max_V_increase", &TrajectoryRecord::max_V_increase)
      .def_readonly("max_lyapunov_defect", &TrajectoryRecord::max_lyapunov_defect)
      .def_readonly("max_abs_control", &TrajectoryRecord::max_abs_control_all)
      .def_readonly("converged_time", &TrajectoryRecord::converged_time)
      .def_property_readonly("final_V", &TrajectoryRecord::final_V);

  m.def(
      "simulate",
      [](const Plant& plant, const Eigen::MatrixXcd& rho_d, const Eigen::MatrixXcd& rho0,
         double dt, double T, int stride, bool feedback, bool stop_on_convergence,
         double convergence_V) {
        SimulateOptions options;
        options.dt = dt;
        options.T = T;
        options.record_stride = stride;
        options.feedback_enabled = feedback;
        options.stop_on_convergence = stop_on_convergence;
        options.convergence_V = convergence_V;
        return simulate_closed_loop(plant, DensityOperator::from_matrix(rho_d),
                                    DensityOperator::from_matrix(rho0), options);
      },
      py::arg("plant"), py::arg("rho_d"), py::arg("rho0"), py::arg("dt") = 1e-3,
      py::arg("T") = 20.0, py::arg("stride") = 1, py::arg("feedback") = true,
      py::arg("stop_on_convergence") = false, py::arg("convergence_V") = 1e-6);
  m.def("rotating_frame", &rotating_frame, py::arg("trajectory"), py::arg("plant"));

  py::class_<Verdict>(m, "Verdict")
      .def_property_readonly("outcome",
                             [](const Verdict& v) { return to_string(v.outcome); })
      .def_readonly("cond_antipodal", &Verdict::cond_antipodal)
      .def_readonly("cond_support_intersect", &Verdict::cond_support_intersect)
      .def_readonly("cond_cardinality", &Verdict::cond_cardinality)
      .def_readonly("m", &Verdict::m)
      .def_readonly("chi", &Verdict::chi)
      .def_readonly("card_Fk_commutator", &Verdict::card_Fk_commutator)
      .def_readonly("kalman_rank", &Verdict::kalman_rank)
      .def_readonly("lie_closure_dim", &Verdict::lie_closure_dim)
      .def("to_json", [](const Verdict& v) { return dump_deterministic(verdict_to_json(v)); })
      .def("__repr__", [](const Verdict& v) { return "<Verdict " + to_string(v.outcome) + ">"; });

  m.def(
      "verdict",
      [](const Plant& plant, const Eigen::MatrixXcd& rho_d, const Eigen::MatrixXcd& rho0,
         double support_tol, double degeneracy_tol) {
        return theorem1_verdict(plant, DensityOperator::from_matrix(rho_d),
                                DensityOperator::from_matrix(rho0), support_tol, degeneracy_tol);
      },
      py::arg("plant"), py::arg("rho_d"), py::arg("rho0"), py::arg("support_tol") = 1e-9,
      py::arg("degeneracy_tol") = 1e-8);

  py::class_<Lemma3Report>(m, "Lemma3Report")
      .def_readonly("kalman_ok", &Lemma3Report::kalman_ok)
      .def_readonly("rankW_ok", &Lemma3Report::rankW_ok)
      .def_readonly("cardinality_ok", &Lemma3Report::cardinality_ok)
      .def_readonly("m", &Lemma3Report::m)
      .def_readonly("kalman_rank", &Lemma3Report::kalman_rank_value)
      .def_readonly("rank_W", &Lemma3Report::rank_W_value)
      .def_readonly("card_Fk", &Lemma3Report::card_Fk);

  m.def(
      "lemma3",
      [](const Plant& plant, const Eigen::MatrixXcd& rho_d, double support_tol,
         double degeneracy_tol) {
        return lemma3_equivalence(plant, DensityOperator::from_matrix(rho_d), support_tol,
                                  degeneracy_tol);
      },
      py::arg("plant"), py::arg("rho_d"), py::arg("support_tol") = 1e-9,
      py::arg("degeneracy_tol") = 1e-8);
  m.def(
      "kalman_rank",
      [](const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int m_dim) {
        return kalman_rank(A, b, m_dim);
      },
      py::arg("A"), py::arg("b"), py::arg("m"));
  m.def(
      "lie_closure_dim",
      [](const Plant& plant) { return lie_closure_dim(plant.A(), plant.B()); },
      py::arg("plant"));
  m.def(
      "bracket_span_dim",
      [](const Plant& plant, int depth, bool include_A) {
        return bracket_chain(plant.A(), plant.B(), depth, include_A).span_dim;
      },
      py::arg("plant"), py::arg("depth"), py::arg("include_A") = false);

  m.def("builtin_scenario_names", [] {
    std::vector<std::string> names;
    for (const Scenario& s : builtin_scenarios()) names.push_back(s.name);
    return names;
  });
  m.def(
      "run_builtin_scenario",
      [](const std::string& name, const std::filesystem::path& out_dir) {
        for (const Scenario& s : builtin_scenarios()) {
          if (s.name == name) {
            const ScenarioResult result = run_scenario(s, out_dir);
            py::dict out;
            out["outcome"] = to_string(result.verdict.outcome);
            out["final_V"] = result.final_V;
            out["max_abs_u"] = result.max_abs_u;
            out["verdict_path"] = result.verdict_path.string();
            out["traj_path"] = result.traj_path.string();
            return out;
          }
        }
        throw ConfigError("unknown builtin scenario '" + name + "'");
      },
      py::arg("name"), py::arg("out_dir"));
}
