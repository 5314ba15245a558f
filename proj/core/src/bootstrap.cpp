#include "varboot/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "varboot/parallel.hpp"
#include "varboot/rng.hpp"

namespace varboot {

namespace {

/// One-step Newton-Raphson update of the bootstrap criterion around
/// theta^: theta* = theta^ + (1/2) J^{-1} (1/n) sum D_t (eta*^2 - 1).
/// D_t and J come from the criterion's own filter (the original-series
/// D^_t for the fixed design, the bootstrap-path gradients for the
/// recursive one).
Eigen::VectorXd newton_raphson_step(const Eigen::VectorXd& theta_hat,
                                    const Eigen::MatrixXd& d_mat,
                                    std::span<const double> eta_sq_minus_one,
                                    const FitConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(eta_sq_minus_one.size());
  Eigen::MatrixXd j_mat = Eigen::MatrixXd::Zero(d_mat.rows(), d_mat.rows());
  Eigen::VectorXd score = Eigen::VectorXd::Zero(d_mat.rows());
  for (Eigen::Index t = 0; t < n; ++t) {
    j_mat += d_mat.col(t) * d_mat.col(t).transpose();
    score += d_mat.col(t) * eta_sq_minus_one[static_cast<std::size_t>(t)];
  }
  j_mat /= static_cast<double>(n);
  score /= static_cast<double>(n);
  Eigen::VectorXd step = 0.5 * j_mat.ldlt().solve(score);
  return clamp_to_box(theta_hat + step, cfg);
}

Replicate finish_replicate(const ReturnSeries& original, const ModelSpec& theta_star,
                           const ReturnSeries& residual_basis,
                           std::span<const double> eps_star, double alpha,
                           bool estimator_ok, bool residuals_on_original) {
  Replicate rep;
  rep.theta_star = to_param_vector(theta_star);
  if (!estimator_ok) return rep;

  // Residual step: filter the replicate's own return history at theta*.
  SigmaPath star_path = filter_sigma(theta_star, residual_basis);
  const std::size_t n = eps_star.size();
  std::vector<double> eta_hat_star(n);
  for (std::size_t t = 0; t < n; ++t) {
    eta_hat_star[t] = eps_star[t] / star_path.sigmas[t];
  }
  rep.xi_star = empirical_quantile(eta_hat_star, alpha);

  // VaR step always evaluates sigma~_{n+1}(theta*) on the original series,
  // even under the recursive design.
  double sigma_next = residuals_on_original
                          ? star_path.sigmas.back()
                          : filter_sigma(theta_star, original).sigmas.back();
  rep.var_star = -rep.xi_star * sigma_next;
  rep.ok = std::isfinite(rep.var_star);
  return rep;
}

/// Reflection of x about center, exact in extended precision before the
/// final rounding.
double reflect(double center, double x) {
  return static_cast<double>(2.0L * static_cast<long double>(center) -
                             static_cast<long double>(x));
}

std::size_t quantile_index(std::size_t count, double q) {
  auto k = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(count)));
  if (k < 1) k = 1;
  if (k > count) k = count;
  return k;
}

}  // namespace

void validate(const BootstrapConfig& config) {
  if (config.b_replicates < 1) {
    throw std::invalid_argument("BootstrapConfig: b_replicates must be >= 1");
  }
  validate(config.fit_config);
}

std::vector<double> resample_residuals(const FitResult& fit, std::uint64_t seed) {
  const std::size_t n = fit.residuals.size();
  if (n == 0) throw std::invalid_argument("resample_residuals: fit has no residuals");
  SplitMix64 rng(seed);
  std::vector<double> eta(n);
  for (std::size_t t = 0; t < n; ++t) {
    auto idx = static_cast<std::size_t>(rng.next_uniform() * static_cast<double>(n));
    if (idx >= n) idx = n - 1;
    eta[t] = fit.residuals[idx];
  }
  return eta;
}

Replicate replicate_from_innovations(const FitResult& fit, const ReturnSeries& series,
                                     double alpha, std::span<const double> eta_star,
                                     BootstrapDesign design, EstimatorMode mode,
                                     const FitConfig& fit_config) {
  const std::size_t n = series.size();
  if (eta_star.size() != n) {
    throw std::invalid_argument("replicate_from_innovations: innovation count mismatch");
  }

  if (design == BootstrapDesign::Fixed) {
    ReturnSeries eps_star;
    eps_star.values.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      eps_star.values[t] = fit.sigma_path.sigmas[t] * eta_star[t];
    }
    if (mode == EstimatorMode::NewtonRaphson) {
      std::vector<double> centered(n);
      for (std::size_t t = 0; t < n; ++t) centered[t] = eta_star[t] * eta_star[t] - 1.0;
      Eigen::VectorXd theta = newton_raphson_step(
          to_param_vector(fit.theta_hat), fit.d_hats.leftCols(static_cast<Eigen::Index>(n)),
          centered, fit_config);
      ModelSpec spec = spec_from_vector(family_of(fit.theta_hat), theta);
      return finish_replicate(series, spec, series, eps_star.values, alpha, true,
                              /*residuals_on_original=*/true);
    }
    ThetaEstimate est = estimate_theta_warm(series, eps_star, fit.theta_hat, fit_config);
    return finish_replicate(series, est.spec, series, eps_star.values, alpha,
                            est.diagnostics.converged,
                            /*residuals_on_original=*/true);
  }

  // Recursive design: regenerate the path through the fitted recursion,
  // starting from the original filter's initialization.
  SimulatedPath star =
      simulate_from_innovations(fit.theta_hat, eta_star, fit.sigma_path.init_value);
  const ReturnSeries& eps_star = star.returns;

  if (mode == EstimatorMode::NewtonRaphson) {
    SigmaPath path_at_hat = filter_sigma(fit.theta_hat, eps_star);
    Eigen::MatrixXd grad = sigma_gradient(fit.theta_hat, eps_star, path_at_hat);
    Eigen::MatrixXd d_mat = grad.leftCols(static_cast<Eigen::Index>(n));
    std::vector<double> centered(n);
    for (std::size_t t = 0; t < n; ++t) {
      d_mat.col(static_cast<Eigen::Index>(t)) /= path_at_hat.sigmas[t];
      double eta = eps_star.values[t] / path_at_hat.sigmas[t];
      centered[t] = eta * eta - 1.0;
    }
    Eigen::VectorXd theta = newton_raphson_step(to_param_vector(fit.theta_hat), d_mat,
                                                centered, fit_config);
    ModelSpec spec = spec_from_vector(family_of(fit.theta_hat), theta);
    return finish_replicate(series, spec, eps_star, eps_star.values, alpha, true,
                            /*residuals_on_original=*/false);
  }
  ThetaEstimate est = estimate_theta_warm(eps_star, eps_star, fit.theta_hat, fit_config);
  return finish_replicate(series, est.spec, eps_star, eps_star.values, alpha,
                          est.diagnostics.converged,
                          /*residuals_on_original=*/false);
}

Replicate fixed_design_replicate(const FitResult& fit, const ReturnSeries& series,
                                 double alpha, std::uint64_t seed, EstimatorMode mode,
                                 const FitConfig& fit_config) {
  std::vector<double> eta = resample_residuals(fit, seed);
  return replicate_from_innovations(fit, series, alpha, eta, BootstrapDesign::Fixed,
                                    mode, fit_config);
}

Replicate recursive_design_replicate(const FitResult& fit, const ReturnSeries& series,
                                     double alpha, std::uint64_t seed,
                                     EstimatorMode mode, const FitConfig& fit_config) {
  std::vector<double> eta = resample_residuals(fit, seed);
  return replicate_from_innovations(fit, series, alpha, eta, BootstrapDesign::Recursive,
                                    mode, fit_config);
}

BootstrapOutcome run_bootstrap(const FitResult& fit, const ReturnSeries& series,
                               double alpha, const BootstrapConfig& config,
                               std::size_t threads) {
  validate(config);
  const std::size_t b = config.b_replicates;
  std::vector<Replicate> reps(b);
  parallel_for(
      b,
      [&](std::size_t i) {
        std::uint64_t seed = derive_stream(config.base_seed, i);
        std::vector<double> eta = resample_residuals(fit, seed);
        reps[i] = replicate_from_innovations(fit, series, alpha, eta, config.design,
                                             config.estimator_mode, config.fit_config);
      },
      threads);

  BootstrapOutcome out;
  out.n = series.size();
  out.var_hat = var_point_estimate(fit).value;
  out.var_stars.reserve(b);
  out.theta_stars.reserve(b);
  out.xi_stars.reserve(b);
  for (const Replicate& rep : reps) {
    if (!rep.ok) {
      ++out.failed_count;
      continue;
    }
    out.var_stars.push_back(rep.var_star);
    out.theta_stars.push_back(rep.theta_star);
    out.xi_stars.push_back(rep.xi_star);
  }
  if (out.var_stars.empty()) {
    throw std::runtime_error("run_bootstrap: every replicate failed");
  }
  return out;
}

IntervalSet build_intervals(const BootstrapOutcome& outcome, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("build_intervals: gamma must lie in (0,1)");
  }
  const std::size_t b = outcome.var_stars.size();
  if (b < 50) {
    throw std::invalid_argument("build_intervals: need at least 50 surviving "
                                "replicates, have " + std::to_string(b));
  }
  std::vector<double> sorted = outcome.var_stars;
  std::sort(sorted.begin(), sorted.end());
  const double v = outcome.var_hat;

  // sqrt(n)-scaling and centering are monotone, so the quantiles of
  // G^(x) = edf of sqrt(n)(VaR* - VaR^) are the raw VaR* order statistics
  // shifted back: the RT interval in reduced form is exact by construction.
  double rt_lo = sorted[quantile_index(b, gamma / 2.0) - 1];
  double rt_hi = sorted[quantile_index(b, 1.0 - gamma / 2.0) - 1];

  // EP reflects the tails about VaR^.
  Interval ep{reflect(v, rt_hi), reflect(v, rt_lo)};

  std::vector<double> abs_dev(b);
  for (std::size_t i = 0; i < b; ++i) abs_dev[i] = std::fabs(outcome.var_stars[i] - v);
  std::sort(abs_dev.begin(), abs_dev.end());
  double h = abs_dev[quantile_index(b, 1.0 - gamma) - 1];
  Interval sy{static_cast<double>(static_cast<long double>(v) - h),
              static_cast<double>(static_cast<long double>(v) + h)};

  IntervalSet set{ep, Interval{rt_lo, rt_hi}, sy, gamma};

  // Representation check: lengths and symmetry can be off by the final
  // rounding of the reflected bounds, never more.
  double scale = std::max({std::fabs(v), std::fabs(rt_lo), std::fabs(rt_hi), 1.0});
  double tol = 4.0 * std::numeric_limits<double>::epsilon() * scale;
  if (std::fabs(length(set.ep) - length(set.rt)) > tol ||
      std::fabs((set.sy.hi - v) - (v - set.sy.lo)) > tol) {
    throw std::logic_error("build_intervals: interval identities violated");
  }
  return set;
}

}  // namespace varboot
