#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "phylo/alignment.hpp"
#include "phylo/experiments.hpp"

using namespace phylo;

namespace {

std::string csv(const Table& t) {
  std::ostringstream out;
  write_csv(out, t);
  return out.str();
}

ExperimentConfig named(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  return c;
}

}  // namespace

TEST_CASE("config validation rejects inconsistent parameters") {
  auto c = named("battery-power");
  CHECK_NOTHROW(validate_config(c));
  auto bad = c;
  bad.f = 0.3;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
  bad = c;
  bad.upsilon = 5;  // 1/f = 10
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
  bad = c;
  bad.k_grid = {4, 4, 8};
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
  bad = c;
  bad.g = 0.25;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
  bad = c;
  bad.trials = -1;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
}

TEST_CASE("config JSON round trip and unknown keys") {
  auto c = named("tv-curve");
  c.k_grid = {1, 3, 9};
  c.ell = 2;
  c.g_grid = {0.3};
  auto back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"trails", 3}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"trials", "many"}}), ConfigError);
  auto partial = config_from_json(nlohmann::json{{"tree", {{"h", 2}}}});
  CHECK(partial.tree.kind == "homogeneous");
  CHECK(partial.tree.h == 2);
}

TEST_CASE("csv escaping and number format") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"x\"") == "\"say \"\"x\"\"\"");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2) == "2");
}

TEST_CASE("fit_line recovers an exact line") {
  auto f = fit_line({1, 2, 3, 4}, {5, 3, 1, -1});
  CHECK(f.slope == doctest::Approx(-2));
  CHECK(f.intercept == doctest::Approx(7));
  CHECK(f.r_squared == doctest::Approx(1));
  CHECK(fit_line({1}, {1}).points == 1);
}

TEST_CASE("simulate is deterministic and k = 0 gives a header-only alignment") {
  auto c = named("simulate");
  c.tree.h = 2;
  c.k = 100;
  c.seed = 7;
  std::ostringstream a, b;
  run_simulate(c, a);
  run_simulate(c, b);
  CHECK(a.str() == b.str());
  c.k = 0;
  std::ostringstream empty;
  run_simulate(c, empty);
  std::istringstream in(empty.str());
  auto al = read_alignment(in);
  CHECK(al.sites() == 0);
  CHECK(al.leaves() == 4);
}

TEST_CASE("phase-transition with zero trials writes only headers") {
  auto c = named("phase-transition");
  c.trials = 0;
  auto o = run_phase_transition(c);
  CHECK(o.points.rows.empty());
  CHECK(csv(o.points).find('\n') == csv(o.points).size() - 1);
}

TEST_CASE("phase-transition refuses topology mode beyond the enumeration limit") {
  auto c = named("phase-transition");
  c.mode = "topology";
  c.h_grid = {4};
  c.trials = 1;
  CHECK_THROWS_AS(run_phase_transition(c), ScaleLimit);
}

TEST_CASE("experiment CSVs do not depend on the thread count") {
  auto bp = named("battery-power");
  bp.trials = 30;
  bp.k_grid = {4, 16};
  auto tv = named("tv-curve");
  tv.constructions = 2;
  tv.trials = 40;
  tv.k_grid = {1, 4};
  auto pt = named("phase-transition");
  pt.h_grid = {2};
  pt.g_grid = {0.2};
  pt.k_grid = {8, 32};
  pt.trials = 12;
  pt.mode = "candidates";
  for (auto c : {bp, tv, pt}) {
    CAPTURE(c.experiment);
    c.threads = 1;
    auto one = run_experiment(c);
    c.threads = 4;
    auto four = run_experiment(c);
    CHECK(csv(one.points) == csv(four.points));
    CHECK(csv(one.summary) == csv(four.summary));
  }
}

TEST_CASE("every point row echoes the effective config") {
  auto c = named("distance");
  c.tree.h = 2;
  c.candidate.swap = {3, 5};
  auto o = run_distance(c);
  REQUIRE(o.points.rows.size() == 1);
  auto echo = nlohmann::json::parse(o.points.rows[0].back());
  CHECK(echo["experiment"] == "distance");
  CHECK(echo["candidate"]["swap"] == std::vector<int>{3, 5});
  CHECK_FALSE(echo.contains("threads"));
}

TEST_CASE("distance of a tree to itself is zero") {
  auto c = named("distance");
  c.tree = {"newick", 0, 0, "((1:0.2,2:0.2):0.2,(3:0.2,4:0.2):0.2);", "", 1, {}};
  c.candidate = c.tree;
  auto o = run_distance(c);
  const auto& cols = o.points.columns;
  const auto& row = o.points.rows.at(0);
  auto at = [&](const std::string& name) { return row[std::find(cols.begin(), cols.end(), name) - cols.begin()]; };
  CHECK(at("metric_equal") == "1");
  CHECK(at("swap_distance") == "0");
  CHECK(at("blowup_exact") == "0");
}

TEST_CASE("infer maps enumeration overflow to a scale refusal") {
  auto sim = named("simulate");
  sim.tree.h = 4;
  sim.k = 20;
  std::string path = "infer_scale_test.aln";
  {
    std::ofstream f(path);
    run_simulate(sim, f);
  }
  auto c = named("infer");
  c.alignment = path;
  c.mode = "topology";
  CHECK_THROWS_AS(run_infer(c), ScaleLimit);
  std::remove(path.c_str());
}
