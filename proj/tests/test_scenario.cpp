#include "qflag/scenario.hpp"

#include <filesystem>
#include <fstream>

#include "doctest.h"

using namespace qflag;

namespace {

std::filesystem::path temp_dir(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() / ("qflag_test_" + leaf);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

const Scenario& builtin(const std::string& name) {
  for (const Scenario& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  throw std::runtime_error("missing builtin " + name);
}

}  // namespace

TEST_CASE("builtin battery covers the case matrix") {
  const std::vector<Scenario>& all = builtin_scenarios();
  CHECK(all.size() >= 14);

  std::set<std::string> names;
  std::set<VerdictOutcome> outcomes;
  for (const Scenario& s : all) {
    CHECK(names.insert(s.name).second);
    REQUIRE(s.expected.has_value());
    outcomes.insert(s.expected->outcome);
    // Every builtin validates and realizes.
    const Plant plant = s.make_plant();
    (void)s.rho_d.realize(plant.basis());
    (void)s.rho0.realize(plant.basis());
  }
  // All five outcome classes are represented.
  CHECK(outcomes.size() == 5);
}

TEST_CASE("scenario serialization round trip is idempotent and deterministic") {
  for (const std::string name : {"ex1-diagonal-target", "ex2-blocked-23", "ex2-disjoint-13"}) {
    const Scenario& s = builtin(name);
    const Json once = scenario_to_json(s);
    const Scenario reloaded = scenario_from_json(once);
    const Json twice = scenario_to_json(reloaded);
    CHECK(dump_deterministic(once) == dump_deterministic(twice));
    CHECK(dump_deterministic(once) == dump_deterministic(scenario_to_json(s)));
  }
}

TEST_CASE("scenario loader reports field-level problems") {
  Json base = scenario_to_json(builtin("ex1-diagonal-target"));

  {
    Json j = base;
    j.erase("name");
    CHECK_THROWS_AS(scenario_from_json(j), ConfigError);
  }
  {
    Json j = base;
    j["N"] = 1;
    CHECK_THROWS_AS(scenario_from_json(j), ConfigError);
  }
  {
    Json j = base;
    j["hB_terms"][0]["j"] = 5;
    CHECK_THROWS_AS(scenario_from_json(j), ConfigError);
  }
  {
    Json j = base;
    j["hB_terms"][0]["kind"] = "diag";
    CHECK_THROWS_AS(scenario_from_json(j), ConfigError);
  }
  {
    Json j = base;
    j["dt"] = 0.0;
    CHECK_THROWS_AS(scenario_from_json(j), ConfigError);
  }
  {
    Json j = base;
    j["rho_d"] = Json::object();
    CHECK_THROWS_AS(scenario_from_json(j), ConfigError);
  }
  {
    // Energies are centered on load, with the warn flag set.
    Json j = base;
    j["energies"] = Json::array({0.0, 1.0});
    const Scenario s = scenario_from_json(j);
    CHECK(s.energies_centered_on_load);
    CHECK(std::abs(s.energies.sum()) < 1e-12);
  }
}

TEST_CASE("a reference drift differing from the plant drift is rejected") {
  Scenario s = builtin("ex1-antipodal");
  s.reference_energies = Eigen::Vector2d(-0.4, 0.4);
  const auto dir = temp_dir("refdrift");
  CHECK_THROWS_AS(run_scenario(s, dir), ConfigError);

  s.reference_energies = s.energies;
  CHECK_NOTHROW(run_scenario(s, dir));
}

TEST_CASE("run_scenario writes verdict JSON and trajectory CSV") {
  Scenario s = builtin("ex1-antipodal");
  s.T = 0.5;
  const auto dir = temp_dir("artifacts");
  const ScenarioResult result = run_scenario(s, dir);

  CHECK(std::filesystem::exists(result.verdict_path));
  CHECK(std::filesystem::exists(result.traj_path));

  std::ifstream vf(result.verdict_path);
  Json verdict;
  vf >> verdict;
  const std::vector<std::string> keys = {
      "outcome", "cond_antipodal",      "cond_support_intersect",
      "m",       "chi",                 "card_Fk_commutator",
      "kalman_rank", "lie_closure_dim", "cond_cardinality"};
  for (const std::string& key : keys) CHECK(verdict.contains(key));
  CHECK(verdict.at("outcome") == "AntipodalObstruction");

  // Field order is fixed: outcome must come first.
  std::ifstream raw(result.verdict_path);
  std::string text((std::istreambuf_iterator<char>(raw)), std::istreambuf_iterator<char>());
  CHECK(text.find("\"outcome\"") < text.find("\"cond_antipodal\""));
  CHECK(text.find("\"cond_antipodal\"") < text.find("\"m\""));

  std::ifstream cf(result.traj_path);
  std::string header;
  std::getline(cf, header);
  CHECK(header.rfind("t,u,V,eig_drift,varrho_0", 0) == 0);

  // Determinism: a second run produces byte-identical verdict JSON.
  const ScenarioResult again = run_scenario(s, temp_dir("artifacts2"));
  std::ifstream raw2(again.verdict_path);
  std::string text2((std::istreambuf_iterator<char>(raw2)), std::istreambuf_iterator<char>());
  CHECK(text == text2);
}

TEST_CASE("battery filtering") {
  const auto dir = temp_dir("battery");
  const BatteryReport report = run_battery("ex1-antipodal", dir, 1);
  REQUIRE(report.entries.size() == 1);
  CHECK(report.entries[0].pass);
  CHECK(report.all_pass);

  CHECK_THROWS_AS(run_battery("nothing-matches-*", dir, 1), ConfigError);
}
