#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Cholesky>

#include "varboot/asymptotics.hpp"
#include "varboot/bootstrap.hpp"
#include "varboot/rng.hpp"
#include "test_util.hpp"

using namespace varboot;
namespace tu = varboot::testutil;

namespace {

BootstrapOutcome outcome_from(std::vector<double> var_stars, double var_hat,
                              std::size_t n) {
  BootstrapOutcome o;
  o.var_stars = std::move(var_stars);
  o.var_hat = var_hat;
  o.n = n;
  return o;
}

FitResult garch_high_fit(std::size_t n, std::uint64_t seed,
                         const InnovationDist& dist = StandardNormal{},
                         double alpha = 0.05) {
  ModelSpec spec = Garch11Params{0.05 * 400.0 / 252.0, 0.15, 0.8};
  ReturnSeries series = simulate_path(spec, dist, n, 1000, seed).returns;
  return fit_two_step(series, ModelFamily::Garch11, alpha);
}

ReturnSeries garch_high_series(std::size_t n, std::uint64_t seed,
                               const InnovationDist& dist = StandardNormal{}) {
  ModelSpec spec = Garch11Params{0.05 * 400.0 / 252.0, 0.15, 0.8};
  return simulate_path(spec, dist, n, 1000, seed).returns;
}

}  // namespace

TEST_CASE("interval construction on the 1..100 ladder") {
  std::vector<double> vars(100);
  std::iota(vars.begin(), vars.end(), 1.0);  // sqrt(n) = 1, var_hat = 0
  IntervalSet set = build_intervals(outcome_from(vars, 0.0, 1), 0.10);
  CHECK(set.rt.lo == 5.0);
  CHECK(set.rt.hi == 95.0);
  CHECK(set.ep.lo == -95.0);
  CHECK(set.ep.hi == -5.0);
  CHECK(length(set.ep) == length(set.rt));
  CHECK(length(set.rt) == 90.0);
}

TEST_CASE("EP and RT coincide on a symmetric cloud") {
  std::vector<double> vars;
  for (int k = -50; k <= 50; ++k) {
    if (k != 0) vars.push_back(static_cast<double>(k));
  }
  // gamma with non-integral B*q so the quantile indices reflect: k_lo + k_hi = B + 1
  IntervalSet set = build_intervals(outcome_from(vars, 0.0, 1), 0.09);
  CHECK(set.ep.lo == set.rt.lo);
  CHECK(set.ep.hi == set.rt.hi);
}

TEST_CASE("SY interval uses the absolute-deviation quantile") {
  std::vector<double> vars;
  for (int k = 1; k <= 50; ++k) {
    vars.push_back(static_cast<double>(k));
    vars.push_back(static_cast<double>(-k));
  }
  IntervalSet set = build_intervals(outcome_from(vars, 0.0, 1), 0.10);
  CHECK(set.sy.lo == -45.0);
  CHECK(set.sy.hi == 45.0);
}

TEST_CASE("interval construction demands enough survivors") {
  std::vector<double> vars(49, 1.0);
  CHECK_THROWS_AS(build_intervals(outcome_from(vars, 0.0, 1), 0.10),
                  std::invalid_argument);
}

TEST_CASE("degenerate resample reproduces theta up to the score norm") {
  FitResult fit = garch_high_fit(2000, 1001);
  REQUIRE(fit.converged);
  ReturnSeries series = garch_high_series(2000, 1001);

  Replicate rep = replicate_from_innovations(fit, series, 0.05, fit.residuals,
                                             BootstrapDesign::Fixed,
                                             EstimatorMode::NewtonRaphson);
  REQUIRE(rep.ok);

  SigmaAlphaComponents comps = plug_in_components(fit, 0.05);
  Eigen::VectorXd score = qml_score(fit);
  Eigen::VectorXd expected_shift = 0.5 * comps.j_mat.ldlt().solve(score);
  Eigen::VectorXd shift = rep.theta_star - to_param_vector(fit.theta_hat);
  CHECK((shift - expected_shift).norm() < 1e-10);
  CHECK(score.norm() < 1e-3);
  CHECK(shift.norm() <= 0.5 * comps.j_mat.ldlt()
                                 .solve(Eigen::MatrixXd::Identity(3, 3))
                                 .norm() *
                            score.norm() * (1.0 + 1e-9));
}

TEST_CASE("replicates are deterministic in the seed") {
  FitResult fit = garch_high_fit(500, 2020);
  REQUIRE(fit.converged);
  ReturnSeries series = garch_high_series(500, 2020);
  Replicate a = fixed_design_replicate(fit, series, 0.05, 42, EstimatorMode::FullQmle);
  Replicate b = fixed_design_replicate(fit, series, 0.05, 42, EstimatorMode::FullQmle);
  CHECK(a.var_star == b.var_star);
  CHECK(a.xi_star == b.xi_star);
  CHECK(a.theta_star == b.theta_star);
  Replicate c = fixed_design_replicate(fit, series, 0.05, 43, EstimatorMode::FullQmle);
  CHECK(a.var_star != c.var_star);
}

TEST_CASE("run_bootstrap honors B, seeds and scheduling") {
  FitResult fit = garch_high_fit(500, 3030);
  REQUIRE(fit.converged);
  ReturnSeries series = garch_high_series(500, 3030);

  BootstrapConfig cfg;
  cfg.b_replicates = 1;
  cfg.base_seed = 7;
  BootstrapOutcome one = run_bootstrap(fit, series, 0.05, cfg);
  CHECK(one.var_stars.size() + one.failed_count == 1);

  cfg.b_replicates = 64;
  BootstrapOutcome serial = run_bootstrap(fit, series, 0.05, cfg, 1);
  BootstrapOutcome parallel = run_bootstrap(fit, series, 0.05, cfg, 2);
  CHECK(serial.var_stars == parallel.var_stars);
  CHECK(serial.failed_count == parallel.failed_count);

  // replicate b only depends on (base_seed, b)
  Replicate direct = fixed_design_replicate(fit, series, 0.05,
                                            derive_stream(cfg.base_seed, 5),
                                            EstimatorMode::FullQmle);
  if (direct.ok && serial.failed_count == 0) {
    CHECK(serial.var_stars[5] == direct.var_star);
  }
}

TEST_CASE("resampled innovations have unit mean square on average") {
  FitResult fit = garch_high_fit(1000, 4040);
  REQUIRE(fit.converged);
  const std::size_t b = 400;
  const std::size_t n = fit.residuals.size();
  std::vector<double> means(b);
  for (std::size_t i = 0; i < b; ++i) {
    std::vector<double> eta = resample_residuals(fit, derive_stream(99, i));
    double acc = 0.0;
    for (double e : eta) acc += e * e;
    means[i] = acc / static_cast<double>(n);
  }
  double resample_center = 0.0;
  for (double e : fit.residuals) resample_center += e * e;
  resample_center /= static_cast<double>(n);
  CHECK(std::fabs(resample_center - 1.0) < 1e-3);  // Remark-1 identity

  double grand = tu::mean(means);
  double se = tu::sample_sd(means) / std::sqrt(static_cast<double>(b));
  CHECK(std::fabs(grand - resample_center) <= 3.0 * se);
}

TEST_CASE("newton-raphson tracks the full bootstrap QMLE across shared seeds") {
  FitResult fit = garch_high_fit(5000, 5050, NormalizedStudentT{6});
  REQUIRE(fit.converged);
  ReturnSeries series = garch_high_series(5000, 5050, NormalizedStudentT{6});

  const std::size_t b = 200;
  std::vector<std::vector<double>> full(3, std::vector<double>(b));
  std::vector<std::vector<double>> nr(3, std::vector<double>(b));
  std::size_t used = 0;
  for (std::size_t i = 0; i < b; ++i) {
    std::uint64_t seed = derive_stream(777, i);
    Replicate f = fixed_design_replicate(fit, series, 0.05, seed,
                                         EstimatorMode::FullQmle);
    Replicate q = fixed_design_replicate(fit, series, 0.05, seed,
                                         EstimatorMode::NewtonRaphson);
    if (!f.ok || !q.ok) continue;
    for (int j = 0; j < 3; ++j) {
      full[j][used] = f.theta_star[j];
      nr[j][used] = q.theta_star[j];
    }
    ++used;
  }
  REQUIRE(used > b * 9 / 10);
  for (int j = 0; j < 3; ++j) {
    full[j].resize(used);
    nr[j].resize(used);
    CHECK(tu::pearson(full[j], nr[j]) > 0.9);
  }
}

TEST_CASE("fixed-design theta spread matches the asymptotic scale") {
  FitResult fit = garch_high_fit(5000, 6060);
  REQUIRE(fit.converged);
  ReturnSeries series = garch_high_series(5000, 6060);

  BootstrapConfig cfg;
  cfg.b_replicates = 2000;
  cfg.base_seed = 11;
  cfg.estimator_mode = EstimatorMode::FullQmle;
  BootstrapOutcome outcome = run_bootstrap(fit, series, 0.05, cfg);
  REQUIRE(outcome.var_stars.size() > 1900);

  double omega_hat = to_param_vector(fit.theta_hat)[0];
  std::vector<double> scaled;
  scaled.reserve(outcome.theta_stars.size());
  for (const auto& th : outcome.theta_stars) {
    scaled.push_back(std::sqrt(5000.0) * (th[0] - omega_hat));
  }
  double sd_boot = tu::sample_sd(scaled);

  SigmaAlphaComponents comps = plug_in_components(fit, 0.05);
  Eigen::MatrixXd j_inv = comps.j_mat.ldlt().solve(Eigen::MatrixXd::Identity(3, 3));
  double sd_asy = std::sqrt((comps.kappa - 1.0) / 4.0 * j_inv(0, 0));
  CHECK(std::fabs(sd_boot - sd_asy) < 0.2 * sd_asy);
}

TEST_CASE("beta = 0 makes fixed and recursive designs distributionally equal") {
  // ARCH(1) truth: beta^ sits on its zero bound, which flags the fit as
  // non-interior; the replicate distributions are still well defined.
  // Newton-Raphson replicates keep the comparison free of inner boundary
  // effects.
  ModelSpec spec = Garch11Params{0.1, 0.3, 0.0};
  ReturnSeries series = simulate_path(spec, StandardNormal{}, 1000, 1000, 7070).returns;
  FitResult fit = fit_two_step(series, ModelFamily::Garch11, 0.05);
  REQUIRE(std::isfinite(var_point_estimate(fit).value));
  CHECK(to_param_vector(fit.theta_hat)[2] < 0.05);

  const std::size_t b = 2000;
  std::vector<double> fixed_vars, rec_vars;
  fixed_vars.reserve(b);
  rec_vars.reserve(b);
  for (std::size_t i = 0; i < b; ++i) {
    Replicate f = fixed_design_replicate(fit, series, 0.05, derive_stream(1, i),
                                         EstimatorMode::NewtonRaphson);
    Replicate r = recursive_design_replicate(fit, series, 0.05, derive_stream(2, i),
                                             EstimatorMode::NewtonRaphson);
    if (f.ok) fixed_vars.push_back(f.var_star);
    if (r.ok) rec_vars.push_back(r.var_star);
  }
  REQUIRE(fixed_vars.size() > b * 99 / 100);
  REQUIRE(rec_vars.size() > b * 99 / 100);
  double d = tu::ks_statistic(fixed_vars, rec_vars);
  CHECK(tu::ks_p_value(d, fixed_vars.size(), rec_vars.size()) > 0.01);
}

TEST_CASE("recursive replicates are deterministic too") {
  FitResult fit = garch_high_fit(400, 8080);
  REQUIRE(fit.converged);
  ReturnSeries series = garch_high_series(400, 8080);
  Replicate a =
      recursive_design_replicate(fit, series, 0.05, 5, EstimatorMode::FullQmle);
  Replicate b =
      recursive_design_replicate(fit, series, 0.05, 5, EstimatorMode::FullQmle);
  CHECK(a.var_star == b.var_star);
  CHECK(a.theta_star == b.theta_star);
}

TEST_CASE("pipeline intervals satisfy the construction identities") {
  FitResult fit = garch_high_fit(500, 9090, NormalizedStudentT{6});
  REQUIRE(fit.converged);
  ReturnSeries series = garch_high_series(500, 9090, NormalizedStudentT{6});

  BootstrapConfig cfg;
  cfg.b_replicates = 499;
  cfg.base_seed = 99;
  BootstrapOutcome outcome = run_bootstrap(fit, series, 0.05, cfg);
  IntervalSet set = build_intervals(outcome, 0.10);

  // RT reduced form: bounds are raw VaR* order statistics, bitwise.
  std::vector<double> sorted = outcome.var_stars;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t b = sorted.size();
  auto k = [&](double q) {
    return static_cast<std::size_t>(std::ceil(q * static_cast<double>(b)));
  };
  CHECK(set.rt.lo == sorted[k(0.05) - 1]);
  CHECK(set.rt.hi == sorted[k(0.95) - 1]);

  // lengths agree to the representational limit of the reflected bounds
  double scale = std::max(std::fabs(set.rt.hi), 1.0);
  CHECK(std::fabs(length(set.ep) - length(set.rt)) <= 4e-16 * scale);
  CHECK(std::fabs((set.sy.hi - outcome.var_hat) - (outcome.var_hat - set.sy.lo)) <=
        4e-16 * scale);

  // median of VaR* lies inside EP union RT for moderate gamma
  double median = sorted[b / 2];
  bool in_ep = median >= set.ep.lo && median <= set.ep.hi;
  bool in_rt = median >= set.rt.lo && median <= set.rt.hi;
  CHECK((in_ep || in_rt));
}

TEST_CASE("bootstrap validation rejects bad configs") {
  BootstrapConfig cfg;
  cfg.b_replicates = 0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}
