#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "sonarloc/config.hpp"

using namespace sonarloc;

namespace {

ConfigTree parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST_CASE("values are JSON literals with a bare-string fallback") {
  CHECK(parse_config_value("3") == 3);
  CHECK(parse_config_value("0.25") == 0.25);
  CHECK(parse_config_value("true") == true);
  CHECK(parse_config_value("[1, 2]") == nlohmann::json::array({1, 2}));
  CHECK(parse_config_value("\"a b\"") == "a b");
  CHECK(parse_config_value("results/run1") == "results/run1");
}

TEST_CASE("file syntax") {
  const ConfigTree t = parse(
      "# comment\n"
      "seed = 7   # trailing comment\n"
      "\n"
      "inject = \"50:6>1 # not a comment\"\n"
      "  noise.sonar_range=0.1\n");
  CHECK(t.size() == 3);
  CHECK(t.at("seed") == 7);
  CHECK(t.at("inject") == "50:6>1 # not a comment");
  CHECK(t.at("noise.sonar_range") == 0.1);
  CHECK_THROWS_AS(parse("seed 7\n"), ConfigError);
  CHECK_THROWS_AS(parse("= 7\n"), ConfigError);
  CHECK_THROWS_AS(parse("seed = 1\nseed = 2\n"), ConfigError);
}

TEST_CASE("scenario keys apply over the standard world") {
  const ScenarioConfig c = scenario_from_tree(parse(
      "seed = 12\n"
      "trajectory.side_length = 8\n"
      "noise.sonar_bearing = 0.01\n"
      "landmarks.positions = [[3, 1.0, 2.0, 0.0], [4, 5.0, -1.0, 0.0]]\n"
      "sparsity.windows = [[10, 12, 1]]\n"
      "inject = \"20:3>4\"\n"));
  CHECK(c.seed == 12);
  CHECK(c.trajectory.side_length == 8.0);
  CHECK(c.noise.sonar_bearing == 0.01);
  CHECK(c.noise.sonar_range == 0.05);
  REQUIRE(c.landmarks.size() == 2);
  CHECK(c.landmarks[1].id == 4);
  CHECK(c.landmarks[1].position.y() == -1.0);
  REQUIRE(c.sparsity.size() == 1);
  CHECK(c.sparsity[0].last == 12);
  REQUIRE(c.injections.size() == 1);
  CHECK(c.injections[0].relabel.at(3) == 4);
}

TEST_CASE("scenario keys are checked") {
  CHECK_THROWS_AS(scenario_from_tree(parse("sede = 1\n")), ConfigError);
  CHECK_THROWS_AS(scenario_from_tree(parse("seed = -1\n")), ConfigError);
  CHECK_THROWS_AS(scenario_from_tree(parse("trajectory.corner_steps = 2.5\n")), ConfigError);
  CHECK_THROWS_AS(scenario_from_tree(parse("noise.sonar_range = \"big\"\n")), ConfigError);
  CHECK_THROWS_AS(scenario_from_tree(parse("noise.sonar_range = -0.1\n")), ConfigError);
  CHECK_THROWS_AS(scenario_from_tree(parse("landmarks.positions = [[1, 2]]\n")), ConfigError);
}

TEST_CASE("scenario config round trips through the tree") {
  ScenarioConfig c = ScenarioConfig::standard();
  c.seed = 99;
  c.injections = parse_injections("50:6>1,7>8");
  c.imu.rate = 50.0;
  std::ostringstream out;
  write_config(out, to_tree(c));
  std::istringstream in(out.str());
  const ScenarioConfig back = scenario_from_tree(parse_config(in));
  CHECK(to_tree(back) == to_tree(c));
}

TEST_CASE("run keys") {
  const RunConfig r = run_from_tree(parse(
      "scenario = scenario_dir\n"
      "method = proposed\n"
      "thresholds.sigma_low = 0.2\n"
      "thresholds.sigma_high = 1.2\n"
      "window.max_size = 4\n"
      "solver.method = gn\n"
      "odometry.source = imu\n"
      "seed = 5\n"));
  CHECK(r.scenario == "scenario_dir");
  CHECK(r.method == "proposed");
  CHECK(r.pipeline.thresholds.sigma_low == 0.2);
  CHECK(r.pipeline.max_window == 4);
  CHECK(r.pipeline.solver.method == SolverMethod::GaussNewton);
  CHECK(r.odometry_source == OdometrySource::Imu);
  CHECK(r.seed == 5u);

  std::ostringstream out;
  write_config(out, to_tree(r));
  std::istringstream in(out.str());
  CHECK(to_tree(run_from_tree(parse_config(in))) == to_tree(r));
}

TEST_CASE("run keys are checked") {
  CHECK_THROWS_AS(run_from_tree(parse("method = all\n")), ConfigError);
  CHECK_THROWS_AS(run_from_tree(parse("scenario = s\nmethod = ekf\n")), ConfigError);
  CHECK_THROWS_AS(run_from_tree(parse("scenario = s\nwindow.maxsize = 3\n")), ConfigError);
  CHECK_THROWS_AS(run_from_tree(parse("scenario = s\nodometry.source = dvl\n")), ConfigError);
  CHECK_THROWS_AS(run_from_tree(parse("scenario = s\nthresholds.sigma_low = 2\n")), ConfigError);
  CHECK_THROWS_AS(run_from_tree(parse("scenario = s\nsolver.method = newton\n")), ConfigError);
}
