#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "varboot/montecarlo.hpp"

using namespace varboot;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.spec = preset_spec("garch-high");
  cfg.dist = NormalizedStudentT{6};
  cfg.n = 300;
  cfg.alpha = 0.05;
  cfg.gamma = 0.10;
  cfg.s_sims = 24;
  cfg.bootstrap.b_replicates = 99;
  cfg.bootstrap.estimator_mode = EstimatorMode::NewtonRaphson;
  cfg.master_seed = 2024;
  return cfg;
}

}  // namespace

TEST_CASE("presets cover the four simulation designs") {
  for (const auto& name : preset_names()) CHECK_NOTHROW(validate(preset_spec(name)));
  CHECK(std::get<Garch11Params>(preset_spec("garch-high")).omega ==
        doctest::Approx(0.05 * 400.0 / 252.0));
  CHECK(std::get<TGarch11Params>(preset_spec("tgarch-low")).alpha_minus ==
        doctest::Approx(0.3));
  CHECK_THROWS_AS(preset_spec("garch-medium"), std::invalid_argument);
}

TEST_CASE("degenerate nominal level collapses coverage") {
  ExperimentConfig cfg = small_config();
  cfg.gamma = 0.999;  // nominal coverage ~ 0
  CoverageReport report = run_experiment(cfg);
  REQUIRE(report.completed_sims > 0);
  CHECK(report.rt.avg_coverage < 10.0);
  CHECK(report.rt.below + report.rt.above > 90.0);
}

TEST_CASE("coverage accounting identity holds exactly") {
  CoverageReport report = run_experiment(small_config());
  REQUIRE(report.completed_sims > 0);
  for (const IntervalStats* s : {&report.ep, &report.rt, &report.sy}) {
    CHECK(s->cover_count + s->below_count + s->above_count == report.completed_sims);
    CHECK(s->avg_coverage + s->below + s->above == doctest::Approx(100.0).epsilon(1e-12));
  }
  CHECK(report.ep_rt_gap ==
        doctest::Approx(report.rt.avg_coverage - report.ep.avg_coverage));
}

TEST_CASE("EP and RT average lengths coincide") {
  CoverageReport report = run_experiment(small_config());
  CHECK(report.ep.avg_length == doctest::Approx(report.rt.avg_length).epsilon(1e-12));
}

TEST_CASE("reports are reproducible across thread counts") {
  ExperimentConfig cfg = small_config();
  CoverageReport serial = run_experiment(cfg, 1);
  CoverageReport parallel = run_experiment(cfg, 2);
  CHECK(report_to_json(serial) == report_to_json(parallel));
}

TEST_CASE("gap table reads the reports") {
  CoverageReport a;
  a.rt.avg_coverage = 91.5;
  a.ep.avg_coverage = 84.5;
  a.ep_rt_gap = 7.0;
  CoverageReport b;
  b.ep_rt_gap = 0.0;
  std::map<std::string, CoverageReport> reports{{"n=500", a}, {"n=5000", b}};
  std::vector<GapRow> rows = gap_table(reports);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].label == "n=500");
  CHECK(rows[0].gap == doctest::Approx(7.0));
  CHECK(rows[1].gap == doctest::Approx(0.0));
  CHECK_THROWS_AS(gap_table({}), std::invalid_argument);
}

TEST_CASE("ep-rt gap shrinks from n=500 to n=5000") {
  ExperimentConfig base;
  base.spec = preset_spec("garch-high");
  base.dist = NormalizedStudentT{6};
  base.alpha = 0.05;
  base.gamma = 0.10;
  base.s_sims = 200;
  base.bootstrap.b_replicates = 299;
  base.bootstrap.estimator_mode = EstimatorMode::NewtonRaphson;
  base.master_seed = 99;

  ExperimentConfig small_n = base;
  small_n.n = 500;
  ExperimentConfig large_n = base;
  large_n.n = 5000;

  CoverageReport at_500 = run_experiment(small_n);
  CoverageReport at_5000 = run_experiment(large_n);
  CHECK(at_500.ep_rt_gap > 0.0);
  CHECK(at_5000.ep_rt_gap < at_500.ep_rt_gap);
}

TEST_CASE("asymptotic interval rides along when requested") {
  ExperimentConfig cfg = small_config();
  cfg.include_asymptotic = true;
  cfg.s_sims = 10;
  CoverageReport report = run_experiment(cfg);
  REQUIRE(report.asymptotic.has_value());
  CHECK(report.asymptotic->cover_count + report.asymptotic->below_count +
            report.asymptotic->above_count ==
        report.completed_sims);
  std::string table = report_to_table(report);
  CHECK(table.find("ASY") != std::string::npos);
}

TEST_CASE("json serialization omits timing") {
  CoverageReport report = run_experiment(small_config());
  std::string json = report_to_json(report);
  CHECK(json.find("wall_time") == std::string::npos);
  CHECK(json.find("avg_coverage") != std::string::npos);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg = small_config();
  cfg.s_sims = 0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.gamma = 1.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}
