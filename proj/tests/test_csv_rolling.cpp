#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "varboot/csv_io.hpp"
#include "varboot/rng.hpp"
#include "varboot/rolling.hpp"

using namespace varboot;

namespace {

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string write_file(const std::string& name, const std::string& content) {
  std::string path = temp_file(name);
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("load_prices parses a two-row file") {
  std::string path =
      write_file("prices_ok.csv", "date,close\n2018-01-02,100.0\n2018-01-03,101.0\n");
  PriceSeries prices = load_prices(path);
  REQUIRE(prices.size() == 2);
  CHECK(prices.dates[0] == "2018-01-02");
  CHECK(prices.closes[1] == 101.0);
}

TEST_CASE("load_prices error paths") {
  CHECK_THROWS_AS(load_prices(write_file("empty.csv", "")), ParseError);

  std::string dup = write_file(
      "dup.csv", "date,close\n2018-01-02,100\n2018-01-02,101\n");
  CHECK_THROWS_AS(load_prices(dup), std::invalid_argument);

  std::string unsorted = write_file(
      "unsorted.csv", "date,close\n2018-01-03,100\n2018-01-02,101\n");
  CHECK_THROWS_AS(load_prices(unsorted), std::invalid_argument);

  std::string negative = write_file(
      "neg.csv", "date,close\n2018-01-02,100\n2018-01-03,-5\n");
  CHECK_THROWS_AS(load_prices(negative), std::invalid_argument);

  std::string bad_header = write_file("hdr.csv", "day,price\n2018-01-02,100\n");
  CHECK_THROWS_AS(load_prices(bad_header), ParseError);

  std::string garbled = write_file(
      "garbled.csv", "date,close\n2018-01-02,100\n2018-01-03,abc\n");
  try {
    load_prices(garbled);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("to_returns computes 100 log ratios") {
  PriceSeries prices;
  prices.dates = {"d1", "d2"};
  prices.closes = {100.0, 101.0};
  ReturnSeries r = to_returns(prices);
  REQUIRE(r.size() == 1);
  CHECK(r.values[0] == doctest::Approx(0.995033).epsilon(1e-6));

  prices.closes = {100.0, 100.0};
  CHECK(to_returns(prices).values[0] == 0.0);

  prices.closes = {100.0, 50.0};
  CHECK(to_returns(prices).values[0] == doctest::Approx(-69.3147).epsilon(1e-6));

  PriceSeries single;
  single.dates = {"d1"};
  single.closes = {100.0};
  CHECK_THROWS_AS(to_returns(single), std::invalid_argument);
}

TEST_CASE("returns round-trip through csv refits bit-identically") {
  ModelSpec spec = Garch11Params{0.05 * 400.0 / 252.0, 0.15, 0.8};
  SimulatedPath sim = simulate_path(spec, StandardNormal{}, 600, 1000, 33);
  DatedReturns dated;
  dated.returns = sim.returns;
  for (std::size_t i = 0; i < sim.returns.size(); ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "t%06zu", i);
    dated.dates.emplace_back(buf);
  }
  std::string path = temp_file("roundtrip.csv");
  write_returns_csv(path, dated);
  DatedReturns loaded = load_returns(path);
  REQUIRE(loaded.returns.size() == dated.returns.size());
  CHECK(loaded.returns.values == dated.returns.values);  // %.17g is lossless

  ThetaEstimate a = estimate_theta(dated.returns, ModelFamily::Garch11);
  ThetaEstimate b = estimate_theta(loaded.returns, ModelFamily::Garch11);
  CHECK(to_param_vector(a.spec) == to_param_vector(b.spec));
}

namespace {

PriceSeries synthetic_prices(std::size_t count, std::uint64_t seed) {
  ModelSpec spec = TGarch11Params{0.05 * 20.0 / std::sqrt(252.0), 0.05, 0.10, 0.8};
  SimulatedPath sim = simulate_path(spec, StandardNormal{}, count - 1, 1000, seed);
  PriceSeries prices;
  double level = 1000.0;
  prices.dates.reserve(count);
  prices.closes.reserve(count);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "t%06d", 0);
  prices.dates.emplace_back(buf);
  prices.closes.push_back(level);
  for (std::size_t i = 0; i < sim.returns.size(); ++i) {
    level *= std::exp(sim.returns.values[i] / 100.0);
    std::snprintf(buf, sizeof(buf), "t%06zu", i + 1);
    prices.dates.emplace_back(buf);
    prices.closes.push_back(level);
  }
  return prices;
}

}  // namespace

TEST_CASE("rolling windows overlap by n-1 returns and report forecast dates") {
  PriceSeries prices = synthetic_prices(361, 71);
  DatedReturns returns = to_dated_returns(prices);

  RollingConfig cfg;
  cfg.window_n = 300;
  cfg.steps = 25;
  cfg.family = ModelFamily::TGarch11;
  cfg.bootstrap.b_replicates = 99;
  cfg.bootstrap.base_seed = 5;
  cfg.bootstrap.estimator_mode = EstimatorMode::NewtonRaphson;

  std::vector<WindowRecord> records = rolling_var(prices, cfg);
  REQUIRE(records.size() == 25);
  for (std::size_t w = 0; w < records.size(); ++w) {
    CHECK(records[w].window == w);
    // window w covers returns [w, w+n); the record is dated by the
    // forecast-target return w+n
    CHECK(records[w].date == returns.dates[w + cfg.window_n]);
  }
}

TEST_CASE("rolling with one step equals the direct pipeline") {
  PriceSeries prices = synthetic_prices(401, 99);
  DatedReturns returns = to_dated_returns(prices);

  RollingConfig cfg;
  cfg.window_n = 400;
  cfg.steps = 0;
  CHECK_THROWS_AS(rolling_var(prices, cfg), std::invalid_argument);

  cfg.window_n = 300;
  cfg.steps = 1;
  cfg.family = ModelFamily::TGarch11;
  cfg.alpha = 0.05;
  cfg.gamma = 0.05;
  cfg.bootstrap.b_replicates = 199;
  cfg.bootstrap.base_seed = 1234;
  std::vector<WindowRecord> records = rolling_var(prices, cfg);
  REQUIRE(records.size() == 1);
  REQUIRE(records[0].ok);

  ReturnSeries window;
  window.values.assign(returns.returns.values.begin(),
                       returns.returns.values.begin() + 300);
  FitResult fit = fit_two_step(window, ModelFamily::TGarch11, 0.05);
  BootstrapConfig boot = cfg.bootstrap;
  boot.base_seed = derive_stream(cfg.bootstrap.base_seed, 0);
  IntervalSet set = build_intervals(run_bootstrap(fit, window, 0.05, boot), 0.05);

  CHECK(records[0].var_hat == var_point_estimate(fit).value);
  CHECK(records[0].rt_lo == set.rt.lo);
  CHECK(records[0].rt_hi == set.rt.hi);
}

TEST_CASE("rolling rejects oversize protocols") {
  PriceSeries prices = synthetic_prices(200, 7);
  RollingConfig cfg;
  cfg.window_n = 190;
  cfg.steps = 20;  // 190 + 20 > 199 returns
  CHECK_THROWS_AS(rolling_var(prices, cfg), std::invalid_argument);
}
