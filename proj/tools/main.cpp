#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "varboot/asymptotics.hpp"
#include "varboot/bootstrap.hpp"
#include "varboot/csv_io.hpp"
#include "varboot/montecarlo.hpp"
#include "varboot/parallel.hpp"
#include "varboot/rolling.hpp"
#include "varboot/version.hpp"
#include "config_file.hpp"

namespace {

using nlohmann::ordered_json;
using namespace varboot;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

InnovationDist make_dist(const std::string& name, int nu) {
  if (name == "normal") return StandardNormal{};
  if (name == "student") return NormalizedStudentT{nu};
  throw CLI::ValidationError("--dist", "expected 'normal' or 'student'");
}

std::string dist_name(const InnovationDist& dist) {
  return std::holds_alternative<StandardNormal>(dist) ? "normal" : "student";
}

BootstrapDesign make_design(const std::string& name) {
  if (name == "fixed") return BootstrapDesign::Fixed;
  if (name == "recursive") return BootstrapDesign::Recursive;
  throw CLI::ValidationError("--design", "expected 'fixed' or 'recursive'");
}

EstimatorMode make_mode(const std::string& name) {
  if (name == "full") return EstimatorMode::FullQmle;
  if (name == "nr") return EstimatorMode::NewtonRaphson;
  throw CLI::ValidationError("--mode", "expected 'full' or 'nr'");
}

ordered_json theta_json(const ModelSpec& spec) {
  if (const auto* g = std::get_if<Garch11Params>(&spec)) {
    return ordered_json{{"omega", g->omega}, {"alpha", g->alpha}, {"beta", g->beta}};
  }
  const auto& t = std::get<TGarch11Params>(spec);
  return ordered_json{{"omega", t.omega},
                      {"alpha_plus", t.alpha_plus},
                      {"alpha_minus", t.alpha_minus},
                      {"beta", t.beta}};
}

ordered_json interval_json(double lo, double hi) {
  return ordered_json{{"lo", lo}, {"hi", hi}};
}

/// Standard output envelope: {config, results, failures, version, seed}.
ordered_json envelope(ordered_json config, ordered_json results, ordered_json failures,
                      std::uint64_t seed) {
  ordered_json out;
  out["config"] = std::move(config);
  out["results"] = std::move(results);
  out["failures"] = std::move(failures);
  out["version"] = kVersion;
  out["seed"] = seed;
  return out;
}

void emit_json(const std::string& path, const ordered_json& payload) {
  if (path.empty()) return;
  if (path == "-") {
    std::cout << payload.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write JSON file: " + path);
  out << payload.dump(2) << "\n";
}

DatedReturns read_returns(const std::string& path, const std::string& date_col,
                          const std::string& value_col) {
  return load_returns(path, CsvColumns{date_col, value_col});
}

// ---- simulate ----------------------------------------------------------

struct SimulateArgs {
  std::string preset;
  std::string family = "garch";
  double omega = 0.05 * 400.0 / 252.0;
  double alpha = 0.15;
  double beta = 0.8;
  double alpha_plus = 0.05;
  double alpha_minus = 0.10;
  std::string dist = "normal";
  int nu = 6;
  std::size_t n = 1000;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 0;
  std::string out_csv;
  std::string out_json;
};

int run_simulate(const SimulateArgs& args) {
  ModelSpec spec;
  if (!args.preset.empty()) {
    spec = preset_spec(args.preset);
  } else if (args.family == "garch") {
    spec = Garch11Params{args.omega, args.alpha, args.beta};
  } else {
    spec = TGarch11Params{args.omega, args.alpha_plus, args.alpha_minus, args.beta};
  }
  InnovationDist dist = make_dist(args.dist, args.nu);
  SimulatedPath path = simulate_path(spec, dist, args.n, args.burn_in, args.seed);

  DatedReturns dated;
  dated.returns = path.returns;
  dated.dates.reserve(args.n);
  char buf[16];
  for (std::size_t i = 0; i < args.n; ++i) {
    std::snprintf(buf, sizeof(buf), "t%06zu", i + 1);
    dated.dates.emplace_back(buf);
  }
  if (!args.out_csv.empty()) write_returns_csv(args.out_csv, dated);

  ordered_json config{{"preset", args.preset},
                      {"family", family_name(family_of(spec))},
                      {"theta", theta_json(spec)},
                      {"dist", dist_name(dist)},
                      {"nu", args.nu},
                      {"n", args.n},
                      {"burn_in", args.burn_in},
                      {"out", args.out_csv}};
  ordered_json results{{"true_sigma_next", path.true_sigma_next},
                       {"rows_written", args.out_csv.empty() ? 0 : args.n}};
  emit_json(args.out_json, envelope(config, results, ordered_json::array(), args.seed));
  std::fprintf(stdout, "simulated %zu observations (sigma_next %.6f)%s%s\n", args.n,
               path.true_sigma_next, args.out_csv.empty() ? "" : " -> ",
               args.out_csv.c_str());
  return 0;
}

// ---- fit ----------------------------------------------------------------

struct FitArgs {
  std::string input;
  std::string date_col = "date";
  std::string value_col = "return";
  std::string family = "garch";
  double alpha = 0.05;
  bool asymptotic = false;
  double gamma = 0.05;
  double bandwidth_exponent = 0.2;
  std::string out_json;
};

int run_fit(const FitArgs& args) {
  DatedReturns data = read_returns(args.input, args.date_col, args.value_col);
  FitResult fit =
      fit_two_step(data.returns, family_from_name(args.family), args.alpha);
  VarEstimate var = var_point_estimate(fit);

  double mean_sq = 0.0;
  for (double e : fit.residuals) mean_sq += e * e;
  mean_sq /= static_cast<double>(fit.residuals.size());

  ordered_json results{{"theta_hat", theta_json(fit.theta_hat)},
                       {"xi_hat", fit.xi_hat},
                       {"sigma_next", var.sigma_next},
                       {"var_hat", var.value},
                       {"loglik", fit.loglik},
                       {"converged", fit.converged},
                       {"boundary_contact", fit.diagnostics.boundary_contact},
                       {"iterations", fit.diagnostics.iterations},
                       {"residual_mean_square", mean_sq}};
  ordered_json failures = ordered_json::array();
  if (!fit.converged) failures.push_back("fit did not converge to an interior optimum");
  if (fit.diagnostics.xi_nonnegative) {
    failures.push_back("residual quantile is non-negative; VaR level alpha may be "
                       "too high for this series");
  }

  if (args.asymptotic) {
    SigmaAlphaComponents comps =
        plug_in_components(fit, args.alpha, args.bandwidth_exponent);
    AsymptoticInterval interval = asymptotic_interval(fit, comps, args.gamma);
    results["asymptotic"] =
        ordered_json{{"lo", interval.lo},
                     {"hi", interval.hi},
                     {"half_width", interval.half_width},
                     {"variance_clamped", interval.variance_clamped},
                     {"zeta_hat", comps.zeta_alpha},
                     {"kappa_hat", comps.kappa},
                     {"f_xi_hat", comps.f_xi}};
  }

  ordered_json config{{"input", args.input},        {"family", args.family},
                      {"alpha", args.alpha},        {"asymptotic", args.asymptotic},
                      {"gamma", args.gamma},        {"n", data.returns.size()},
                      {"bandwidth_exponent", args.bandwidth_exponent}};
  emit_json(args.out_json, envelope(config, results, failures, 0));

  std::fprintf(stdout, "n=%zu VaR=%.6f xi=%.6f sigma_next=%.6f converged=%s\n",
               data.returns.size(), var.value, fit.xi_hat, var.sigma_next,
               fit.converged ? "yes" : "no");
  return 0;
}

// ---- bootstrap ------------------------------------------------------------

struct BootstrapArgs {
  std::string input;
  std::string date_col = "date";
  std::string value_col = "return";
  std::string family = "garch";
  double alpha = 0.05;
  double gamma = 0.10;
  std::string design = "fixed";
  std::string mode = "full";
  std::size_t b = 499;
  std::uint64_t seed = 0;
  std::string out_json;
};

int run_bootstrap_cmd(const BootstrapArgs& args) {
  DatedReturns data = read_returns(args.input, args.date_col, args.value_col);
  FitResult fit =
      fit_two_step(data.returns, family_from_name(args.family), args.alpha);

  BootstrapConfig cfg;
  cfg.design = make_design(args.design);
  cfg.estimator_mode = make_mode(args.mode);
  cfg.b_replicates = args.b;
  cfg.base_seed = args.seed;
  BootstrapOutcome outcome = run_bootstrap(fit, data.returns, args.alpha, cfg);
  IntervalSet intervals = build_intervals(outcome, args.gamma);

  ordered_json results{
      {"var_hat", outcome.var_hat},
      {"xi_hat", fit.xi_hat},
      {"theta_hat", theta_json(fit.theta_hat)},
      {"ep", interval_json(intervals.ep.lo, intervals.ep.hi)},
      {"rt", interval_json(intervals.rt.lo, intervals.rt.hi)},
      {"sy", interval_json(intervals.sy.lo, intervals.sy.hi)},
      {"survivors", outcome.var_stars.size()},
      {"failed_count", outcome.failed_count}};
  ordered_json failures = ordered_json::array();
  if (!fit.converged) failures.push_back("base fit did not converge");

  ordered_json config{{"input", args.input},   {"family", args.family},
                      {"alpha", args.alpha},   {"gamma", args.gamma},
                      {"design", args.design}, {"mode", args.mode},
                      {"b", args.b},           {"n", data.returns.size()}};
  emit_json(args.out_json, envelope(config, results, failures, args.seed));

  std::fprintf(stdout,
               "VaR=%.6f  EP=[%.6f, %.6f]  RT=[%.6f, %.6f]  SY=[%.6f, %.6f]  "
               "(%zu/%zu replicates)\n",
               outcome.var_hat, intervals.ep.lo, intervals.ep.hi, intervals.rt.lo,
               intervals.rt.hi, intervals.sy.lo, intervals.sy.hi,
               outcome.var_stars.size(), args.b);
  return 0;
}

// ---- mc -------------------------------------------------------------------

struct McArgs {
  std::string preset = "garch-high";
  std::string dist = "student";
  int nu = 6;
  std::size_t n = 500;
  double alpha = 0.05;
  double gamma = 0.10;
  std::size_t s = 200;
  std::size_t b = 499;
  std::string design = "fixed";
  std::string mode = "full";
  bool asymptotic = false;
  bool paper_scale = false;
  bool table = false;
  std::uint64_t seed = 0;
  std::size_t burn_in = 1000;
  std::string out_json;
};

int run_mc(const McArgs& args_in) {
  McArgs args = args_in;
  if (args.paper_scale) {
    args.s = 2000;
    args.b = 2000;
    std::fprintf(stderr,
                 "warning: paper-scale run (S = B = 2000); expect a long wait\n");
  }
  ExperimentConfig cfg;
  cfg.spec = preset_spec(args.preset);
  cfg.dist = make_dist(args.dist, args.nu);
  cfg.n = args.n;
  cfg.alpha = args.alpha;
  cfg.gamma = args.gamma;
  cfg.s_sims = args.s;
  cfg.bootstrap.design = make_design(args.design);
  cfg.bootstrap.estimator_mode = make_mode(args.mode);
  cfg.bootstrap.b_replicates = args.b;
  cfg.include_asymptotic = args.asymptotic;
  cfg.master_seed = args.seed;
  cfg.burn_in = args.burn_in;

  CoverageReport report = run_experiment(cfg);

  ordered_json config{{"preset", args.preset},
                      {"dist", args.dist},
                      {"nu", args.nu},
                      {"n", args.n},
                      {"alpha", args.alpha},
                      {"gamma", args.gamma},
                      {"s", args.s},
                      {"b", args.b},
                      {"design", args.design},
                      {"mode", args.mode},
                      {"asymptotic", args.asymptotic},
                      {"burn_in", args.burn_in}};
  ordered_json results = ordered_json::parse(report_to_json(report));
  emit_json(args.out_json, envelope(config, results, ordered_json::array(), args.seed));

  if (args.table || args.out_json.empty()) {
    std::fputs(report_to_table(report).c_str(), stdout);
  }
  std::fprintf(stderr, "mc finished in %.1fs\n", report.wall_time_seconds);
  return 0;
}

// ---- rolling ---------------------------------------------------------------

struct RollingArgs {
  std::string prices;
  std::string date_col = "date";
  std::string close_col = "close";
  std::size_t window = 5100;
  std::size_t steps = 125;
  std::string family = "tgarch";
  double alpha = 0.05;
  double gamma = 0.05;
  std::string design = "fixed";
  std::string mode = "full";
  std::size_t b = 2000;
  std::uint64_t seed = 0;
  std::string out_csv;
  std::string out_json;
};

int run_rolling(const RollingArgs& args) {
  PriceSeries prices = load_prices(args.prices, CsvColumns{args.date_col, args.close_col});

  RollingConfig cfg;
  cfg.window_n = args.window;
  cfg.steps = args.steps;
  cfg.family = family_from_name(args.family);
  cfg.alpha = args.alpha;
  cfg.gamma = args.gamma;
  cfg.bootstrap.design = make_design(args.design);
  cfg.bootstrap.estimator_mode = make_mode(args.mode);
  cfg.bootstrap.b_replicates = args.b;
  cfg.bootstrap.base_seed = args.seed;
  cfg.include_asymptotic = true;

  std::vector<WindowRecord> records = rolling_var(prices, cfg);

  if (!args.out_csv.empty()) {
    std::ofstream out(args.out_csv);
    if (!out) throw std::runtime_error("cannot write file: " + args.out_csv);
    out << "date,var_hat,rt_lo,rt_hi,asy_lo,asy_hi\n";
    char buf[64];
    for (const WindowRecord& rec : records) {
      if (!rec.ok) continue;
      out << rec.date;
      for (double v : {rec.var_hat, rec.rt_lo, rec.rt_hi,
                       rec.asy_lo.value_or(std::nan("")),
                       rec.asy_hi.value_or(std::nan(""))}) {
        std::snprintf(buf, sizeof(buf), ",%.17g", v);
        out << buf;
      }
      out << "\n";
    }
  }

  ordered_json windows = ordered_json::array();
  ordered_json failures = ordered_json::array();
  for (const WindowRecord& rec : records) {
    ordered_json w{{"window", rec.window}, {"date", rec.date}, {"ok", rec.ok}};
    if (rec.ok) {
      w["var_hat"] = rec.var_hat;
      w["rt"] = interval_json(rec.rt_lo, rec.rt_hi);
      if (rec.asy_lo) w["asymptotic"] = interval_json(*rec.asy_lo, *rec.asy_hi);
      w["theta_hat"] = rec.theta_hat;
    } else {
      w["error"] = rec.error;
      failures.push_back(ordered_json{{"window", rec.window}, {"error", rec.error}});
    }
    windows.push_back(std::move(w));
  }

  ordered_json config{{"prices", args.prices}, {"window", args.window},
                      {"steps", args.steps},   {"family", args.family},
                      {"alpha", args.alpha},   {"gamma", args.gamma},
                      {"design", args.design}, {"mode", args.mode},
                      {"b", args.b}};
  emit_json(args.out_json,
            envelope(config, ordered_json{{"windows", std::move(windows)}},
                     failures, args.seed));

  std::size_t ok_count = 0;
  for (const WindowRecord& rec : records) ok_count += rec.ok ? 1 : 0;
  std::fprintf(stdout, "rolling analysis: %zu/%zu windows fitted%s%s\n", ok_count,
               records.size(), args.out_csv.empty() ? "" : " -> ",
               args.out_csv.c_str());
  return 0;
}

// ---- zeta -------------------------------------------------------------------

struct ZetaArgs {
  std::string dist = "normal";
  int nu = 6;
  std::vector<double> alphas{0.05};
  std::string out_json;
};

int run_zeta(const ZetaArgs& args) {
  InnovationDist dist = make_dist(args.dist, args.nu);
  ordered_json rows = ordered_json::array();
  std::fprintf(stdout, "%-8s %-6s %10s %10s %8s %10s %11s %9s\n", "dist", "alpha",
               "xi", "f(xi)", "kappa", "p_alpha", "lambda", "zeta");
  for (double alpha : args.alphas) {
    PopulationComponents c = population_components(dist, alpha);
    std::fprintf(stdout, "%-8s %-6.3f %10.6f %10.6f %8.3f %10.6f %11.2e %9.4f\n",
                 args.dist.c_str(), alpha, c.xi, c.f_xi, c.kappa, c.p_alpha,
                 c.lambda_alpha, c.zeta_alpha);
    std::fprintf(stdout, "zeta(%s, alpha=%.3f) = %.2f\n", args.dist.c_str(), alpha,
                 c.zeta_alpha);
    rows.push_back(ordered_json{{"alpha", alpha},
                                {"xi", c.xi},
                                {"f_xi", c.f_xi},
                                {"kappa", c.kappa},
                                {"p_alpha", c.p_alpha},
                                {"lambda_alpha", c.lambda_alpha},
                                {"zeta_alpha", c.zeta_alpha}});
  }
  ordered_json config{{"dist", args.dist}, {"nu", args.nu}};
  emit_json(args.out_json, envelope(config, ordered_json{{"rows", std::move(rows)}},
                                    ordered_json::array(), 0));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional VaR estimation with residual bootstrap intervals"};
  app.config_formatter(std::make_shared<varboot::cli::MixedConfig>());
  app.set_config("--config", "", "TOML (or JSON) config file; flags override");
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "cap worker threads (overrides VAR_BOOT_THREADS)");

  SimulateArgs sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "simulate a GARCH/T-GARCH path");
  sim_cmd->add_option("--preset", sim.preset,
                      "garch-high|garch-low|tgarch-high|tgarch-low");
  sim_cmd->add_option("--family", sim.family, "garch|tgarch");
  sim_cmd->add_option("--omega", sim.omega);
  sim_cmd->add_option("--alpha", sim.alpha, "garch alpha");
  sim_cmd->add_option("--beta", sim.beta);
  sim_cmd->add_option("--alpha-plus", sim.alpha_plus);
  sim_cmd->add_option("--alpha-minus", sim.alpha_minus);
  sim_cmd->add_option("--dist", sim.dist, "normal|student");
  sim_cmd->add_option("--nu", sim.nu, "Student-t degrees of freedom (> 4)");
  sim_cmd->add_option("--n", sim.n)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--burn-in", sim.burn_in);
  sim_cmd->add_option("--seed", sim.seed);
  sim_cmd->add_option("--out", sim.out_csv, "returns CSV path");
  sim_cmd->add_option("--json", sim.out_json, "JSON output path ('-' for stdout)");

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "two-step conditional VaR estimate");
  fit_cmd->add_option("--input", fit.input, "returns CSV")->required();
  fit_cmd->add_option("--date-col", fit.date_col);
  fit_cmd->add_option("--value-col", fit.value_col);
  fit_cmd->add_option("--family", fit.family, "garch|tgarch");
  fit_cmd->add_option("--alpha", fit.alpha, "VaR level");
  fit_cmd->add_flag("--asymptotic", fit.asymptotic, "add the delta-method interval");
  fit_cmd->add_option("--gamma", fit.gamma, "1 - nominal coverage");
  fit_cmd->add_option("--bandwidth-exponent", fit.bandwidth_exponent,
                      "KDE bandwidth rate in (0, 0.5]");
  fit_cmd->add_option("--json", fit.out_json);

  BootstrapArgs boot;
  CLI::App* boot_cmd =
      app.add_subcommand("bootstrap", "residual bootstrap intervals for one series");
  boot_cmd->add_option("--input", boot.input, "returns CSV")->required();
  boot_cmd->add_option("--date-col", boot.date_col);
  boot_cmd->add_option("--value-col", boot.value_col);
  boot_cmd->add_option("--family", boot.family);
  boot_cmd->add_option("--alpha", boot.alpha);
  boot_cmd->add_option("--gamma", boot.gamma);
  boot_cmd->add_option("--design", boot.design, "fixed|recursive");
  boot_cmd->add_option("--mode", boot.mode, "full|nr");
  boot_cmd->add_option("--b", boot.b, "bootstrap replicates");
  boot_cmd->add_option("--seed", boot.seed);
  boot_cmd->add_option("--json", boot.out_json);

  McArgs mc;
  CLI::App* mc_cmd = app.add_subcommand("mc", "Monte Carlo coverage experiment");
  mc_cmd->add_option("--preset", mc.preset)->required();
  mc_cmd->add_option("--dist", mc.dist);
  mc_cmd->add_option("--nu", mc.nu);
  mc_cmd->add_option("--n", mc.n);
  mc_cmd->add_option("--alpha", mc.alpha);
  mc_cmd->add_option("--gamma", mc.gamma);
  mc_cmd->add_option("--s", mc.s, "simulated paths");
  mc_cmd->add_option("--b", mc.b, "bootstrap replicates");
  mc_cmd->add_option("--design", mc.design);
  mc_cmd->add_option("--mode", mc.mode);
  mc_cmd->add_flag("--asymptotic", mc.asymptotic);
  mc_cmd->add_flag("--paper-scale", mc.paper_scale, "S = B = 2000 (slow)");
  mc_cmd->add_flag("--table", mc.table, "print the coverage table");
  mc_cmd->add_option("--seed", mc.seed);
  mc_cmd->add_option("--burn-in", mc.burn_in);
  mc_cmd->add_option("--json", mc.out_json);

  RollingArgs roll;
  CLI::App* roll_cmd =
      app.add_subcommand("rolling", "rolling-window VaR with RT intervals");
  roll_cmd->add_option("--prices", roll.prices, "price CSV (date,close)")->required();
  roll_cmd->add_option("--date-col", roll.date_col);
  roll_cmd->add_option("--close-col", roll.close_col);
  roll_cmd->add_option("--window", roll.window, "observations per window");
  roll_cmd->add_option("--steps", roll.steps, "number of windows");
  roll_cmd->add_option("--family", roll.family);
  roll_cmd->add_option("--alpha", roll.alpha);
  roll_cmd->add_option("--gamma", roll.gamma);
  roll_cmd->add_option("--design", roll.design);
  roll_cmd->add_option("--mode", roll.mode);
  roll_cmd->add_option("--b", roll.b);
  roll_cmd->add_option("--seed", roll.seed);
  roll_cmd->add_option("--out", roll.out_csv, "plot-ready CSV");
  roll_cmd->add_option("--json", roll.out_json);

  ZetaArgs zeta;
  CLI::App* zeta_cmd =
      app.add_subcommand("zeta", "population asymptotic-variance components");
  zeta_cmd->add_option("--dist", zeta.dist, "normal|student");
  zeta_cmd->add_option("--nu", zeta.nu);
  zeta_cmd->add_option("--alpha", zeta.alphas, "VaR level(s)");
  zeta_cmd->add_option("--json", zeta.out_json);

  CLI11_PARSE(app, argc, argv);

  if (threads > 0) {
    setenv("VAR_BOOT_THREADS", std::to_string(threads).c_str(), 1);
  }

  try {
    if (*sim_cmd) return run_simulate(sim);
    if (*fit_cmd) return run_fit(fit);
    if (*boot_cmd) return run_bootstrap_cmd(boot);
    if (*mc_cmd) return run_mc(mc);
    if (*roll_cmd) return run_rolling(roll);
    if (*zeta_cmd) return run_zeta(zeta);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
  return kExitUsage;
}
