#include "varboot/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "varboot/nelder_mead.hpp"

namespace varboot {

namespace {

constexpr double kAlphaShift = 1e-8;

double sample_mean_square(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc / static_cast<double>(v.size());
}

double sample_mean_abs(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += std::fabs(x);
  return acc / static_cast<double>(v.size());
}

// Box transforms: log for omega, log shifted by 1e-8 for the alphas,
// logistic onto [0, beta_upper] for beta. The unconstrained search then
// respects the parameter space by construction.
Eigen::VectorXd to_unconstrained(const Eigen::VectorXd& theta, const FitConfig& cfg) {
  const int r = static_cast<int>(theta.size());
  Eigen::VectorXd u(r);
  u[0] = std::log(std::clamp(theta[0], cfg.omega_lower, cfg.omega_upper));
  for (int j = 1; j < r - 1; ++j) u[j] = std::log(theta[j] + kAlphaShift);
  double b = std::clamp(theta[r - 1], 1e-12, cfg.beta_upper - 1e-12);
  u[r - 1] = std::log(b / (cfg.beta_upper - b));
  return u;
}

Eigen::VectorXd from_unconstrained(const Eigen::VectorXd& u, const FitConfig& cfg) {
  const int r = static_cast<int>(u.size());
  Eigen::VectorXd theta(r);
  theta[0] = std::clamp(std::exp(std::min(u[0], 500.0)), cfg.omega_lower, cfg.omega_upper);
  for (int j = 1; j < r - 1; ++j) {
    double a = std::exp(std::min(u[j], 500.0)) - kAlphaShift;
    theta[j] = std::clamp(a, 0.0, cfg.alpha_upper);
  }
  theta[r - 1] = cfg.beta_upper / (1.0 + std::exp(-u[r - 1]));
  return theta;
}

struct Criterion {
  const ModelFamily family;
  const FitConfig& cfg;
  std::span<const double> filter_values;
  std::span<const double> response_values;
  Presample presample;
  mutable std::vector<double> sigmas;  // scratch, n+1 slots

  double loglik(const Eigen::VectorXd& theta) const {
    ModelSpec spec = spec_from_vector(family, theta);
    filter_sigma_into(spec, filter_values, default_init_sigma(spec, presample), sigmas);
    const std::size_t n = response_values.size();
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      double ratio = response_values[t] / sigmas[t];
      acc += -0.5 * ratio * ratio - std::log(sigmas[t]);
    }
    return acc / static_cast<double>(n);
  }

  double operator()(const Eigen::VectorXd& u) const {
    return -loglik(from_unconstrained(u, cfg));
  }
};

std::vector<Eigen::VectorXd> starting_points(const ReturnSeries& series,
                                             ModelFamily family, int restarts) {
  std::vector<Eigen::VectorXd> starts;
  if (family == ModelFamily::Garch11) {
    double v = std::max(sample_mean_square(series.values), 1e-10);
    Eigen::VectorXd base(3);
    base << 0.1 * v, 0.1, 0.8;
    starts.push_back(base);
    Eigen::VectorXd p1(3), p2(3);
    p1 << 0.2 * v, 0.2, 0.6;
    p2 << 0.05 * v, 0.05, 0.9;
    starts.push_back(p1);
    starts.push_back(p2);
  } else {
    double s = std::max(sample_mean_abs(series.values), 1e-10);
    Eigen::VectorXd base(4);
    base << 0.1 * s, 0.05, 0.10, 0.8;
    starts.push_back(base);
    Eigen::VectorXd p1(4), p2(4);
    p1 << 0.2 * s, 0.10, 0.20, 0.6;
    p2 << 0.05 * s, 0.02, 0.05, 0.9;
    starts.push_back(p1);
    starts.push_back(p2);
  }
  starts.resize(std::min<std::size_t>(starts.size(), std::max(restarts, 1)));
  return starts;
}

FitDiagnostics detect_boundaries(const Eigen::VectorXd& theta, const FitConfig& cfg,
                                 bool search_converged, int iterations,
                                 double objective) {
  FitDiagnostics d;
  d.iterations = iterations;
  d.objective = objective;
  const int r = static_cast<int>(theta.size());
  if (theta[0] <= cfg.omega_lower * (1.0 + 1e-6) ||
      theta[0] >= cfg.omega_upper * (1.0 - 1e-6)) {
    d.contacts.push_back(0);
  }
  for (int j = 1; j < r - 1; ++j) {
    if (theta[j] <= 1e-7 || theta[j] >= cfg.alpha_upper * (1.0 - 1e-6)) {
      d.contacts.push_back(j);
    }
  }
  if (theta[r - 1] <= 1e-7 || theta[r - 1] >= cfg.beta_upper - 1e-6) {
    d.contacts.push_back(r - 1);
  }
  d.boundary_contact = !d.contacts.empty();
  d.converged = search_converged && !d.boundary_contact;
  return d;
}

// Gauss-Newton polish of the simplex optimum: iterate
// theta <- theta + (1/2) J~^{-1} score with backtracking, so the
// first-order condition holds to near machine precision (the residual
// unit-mean-square identity rides on it).
Eigen::VectorXd gauss_newton_polish(const ReturnSeries& filter_series,
                                    const ReturnSeries& response_series,
                                    ModelFamily family, const FitConfig& cfg,
                                    const Criterion& crit, Eigen::VectorXd theta) {
  double f = crit.loglik(theta);
  const auto n = static_cast<Eigen::Index>(response_series.size());
  for (int iter = 0; iter < 30; ++iter) {
    ModelSpec spec = spec_from_vector(family, theta);
    SigmaPath path = filter_sigma(spec, filter_series);
    Eigen::MatrixXd grad = sigma_gradient(spec, filter_series, path);
    Eigen::VectorXd score = Eigen::VectorXd::Zero(grad.rows());
    Eigen::MatrixXd j_mat = Eigen::MatrixXd::Zero(grad.rows(), grad.rows());
    for (Eigen::Index t = 0; t < n; ++t) {
      Eigen::VectorXd d = grad.col(t) / path.sigmas[static_cast<std::size_t>(t)];
      double eta = response_series.values[static_cast<std::size_t>(t)] /
                   path.sigmas[static_cast<std::size_t>(t)];
      score += d * (eta * eta - 1.0);
      j_mat += d * d.transpose();
    }
    score /= static_cast<double>(n);
    j_mat /= static_cast<double>(n);

    Eigen::VectorXd step = 0.5 * j_mat.ldlt().solve(score);
    if (!step.allFinite()) break;

    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 8; ++halving) {
      Eigen::VectorXd cand = clamp_to_box(theta + scale * step, cfg);
      double fc = crit.loglik(cand);
      if (fc >= f - 1e-13 * (1.0 + std::fabs(f))) {
        double moved = (cand - theta).lpNorm<Eigen::Infinity>();
        theta = cand;
        f = std::max(f, fc);
        accepted = true;
        if (moved < 1e-12 * (1.0 + theta.lpNorm<Eigen::Infinity>())) return theta;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) break;
  }
  return theta;
}

ThetaEstimate run_search(const ReturnSeries& filter_series,
                         const ReturnSeries& response_series, ModelFamily family,
                         const FitConfig& cfg,
                         const std::vector<Eigen::VectorXd>& starts) {
  Criterion crit{family, cfg, filter_series.values, response_series.values,
                 compute_presample(filter_series.values), {}};
  crit.sigmas.resize(filter_series.size() + 1);

  NelderMeadOptions nm;
  nm.max_iterations = cfg.max_iterations;
  nm.f_tolerance = cfg.tolerance;

  bool have_best = false;
  NelderMeadResult best;
  for (const auto& start : starts) {
    NelderMeadResult run = nelder_mead(std::cref(crit), to_unconstrained(start, cfg), nm);
    if (!have_best || run.f_min < best.f_min) {
      best = run;
      have_best = true;
    }
  }
  Eigen::VectorXd theta = gauss_newton_polish(filter_series, response_series, family,
                                              cfg, crit, from_unconstrained(best.x, cfg));
  ThetaEstimate out;
  out.spec = spec_from_vector(family, theta);
  out.diagnostics = detect_boundaries(theta, cfg, best.converged, best.iterations,
                                      crit.loglik(theta));
  return out;
}

}  // namespace

Eigen::VectorXd clamp_to_box(Eigen::VectorXd theta, const FitConfig& config) {
  const int r = static_cast<int>(theta.size());
  theta[0] = std::clamp(theta[0], config.omega_lower, config.omega_upper);
  for (int j = 1; j < r - 1; ++j) {
    theta[j] = std::clamp(theta[j], 0.0, config.alpha_upper);
  }
  theta[r - 1] = std::clamp(theta[r - 1], 0.0, config.beta_upper);
  return theta;
}

void validate(const FitConfig& config) {
  if (!(config.tolerance > 0.0)) {
    throw std::invalid_argument("FitConfig: tolerance must be positive");
  }
  if (!(config.beta_upper > 0.0 && config.beta_upper < 1.0)) {
    throw std::invalid_argument("FitConfig: beta_upper must lie in (0,1)");
  }
  if (config.max_iterations < 1 || config.restarts < 1) {
    throw std::invalid_argument("FitConfig: iteration and restart counts must be >= 1");
  }
}

double qml_objective(const ModelSpec& spec, const ReturnSeries& series,
                     std::optional<double> init_sigma1) {
  validate(spec);
  validate(series, 1);
  SigmaPath path = filter_sigma(spec, series, init_sigma1);
  double acc = 0.0;
  for (std::size_t t = 0; t < series.size(); ++t) {
    double ratio = series.values[t] / path.sigmas[t];
    acc += -0.5 * ratio * ratio - std::log(path.sigmas[t]);
  }
  return acc / static_cast<double>(series.size());
}

double qml_objective_mixed(const ModelSpec& spec, const ReturnSeries& filter_series,
                           const ReturnSeries& response_series) {
  validate(spec);
  validate(filter_series, 1);
  if (filter_series.size() != response_series.size()) {
    throw std::invalid_argument("qml_objective_mixed: series lengths differ");
  }
  std::vector<double> sigmas(filter_series.size() + 1);
  filter_sigma_into(spec, filter_series.values, filter_init_sigma(spec, filter_series),
                    sigmas);
  double acc = 0.0;
  for (std::size_t t = 0; t < response_series.size(); ++t) {
    double ratio = response_series.values[t] / sigmas[t];
    acc += -0.5 * ratio * ratio - std::log(sigmas[t]);
  }
  return acc / static_cast<double>(response_series.size());
}

ThetaEstimate estimate_theta(const ReturnSeries& series, ModelFamily family,
                             const FitConfig& config) {
  validate(config);
  validate(series, 20);
  return run_search(series, series, family, config,
                    starting_points(series, family, config.restarts));
}

ThetaEstimate estimate_theta_warm(const ReturnSeries& filter_series,
                                  const ReturnSeries& response_series,
                                  const ModelSpec& warm_start,
                                  const FitConfig& config) {
  validate(config);
  validate(filter_series, 10);
  ThetaEstimate est = run_search(filter_series, response_series, family_of(warm_start),
                                 config, {to_param_vector(warm_start)});
  if (est.diagnostics.converged) return est;
  // fall back to the full multistart search
  return run_search(filter_series, response_series, family_of(warm_start), config,
                    starting_points(response_series, family_of(warm_start),
                                    config.restarts));
}

double empirical_quantile(std::span<const double> values, double alpha) {
  if (values.empty()) {
    throw std::invalid_argument("empirical_quantile: empty sample");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("empirical_quantile: alpha must lie in (0,1)");
  }
  const std::size_t n = values.size();
  auto k = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n)));
  if (k < 1) k = 1;
  if (k > n) k = n;
  std::vector<double> copy(values.begin(), values.end());
  std::nth_element(copy.begin(), copy.begin() + static_cast<long>(k - 1), copy.end());
  return copy[k - 1];
}

FitResult finish_fit(const ReturnSeries& series, const ThetaEstimate& estimate,
                     double alpha) {
  const std::size_t n = series.size();
  FitResult fit;
  fit.theta_hat = estimate.spec;
  fit.diagnostics = estimate.diagnostics;
  fit.converged = estimate.diagnostics.converged;
  fit.alpha = alpha;
  fit.sigma_path = filter_sigma(estimate.spec, series);
  fit.residuals.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    fit.residuals[t] = series.values[t] / fit.sigma_path.sigmas[t];
  }
  fit.xi_hat = empirical_quantile(fit.residuals, alpha);
  fit.diagnostics.xi_nonnegative = fit.xi_hat >= 0.0;
  Eigen::MatrixXd grad = sigma_gradient(estimate.spec, series, fit.sigma_path);
  fit.d_hats = grad;
  for (Eigen::Index i = 0; i < fit.d_hats.cols(); ++i) {
    fit.d_hats.col(i) /= fit.sigma_path.sigmas[static_cast<std::size_t>(i)];
  }
  fit.loglik = qml_objective(estimate.spec, series);
  return fit;
}

FitResult fit_two_step(const ReturnSeries& series, ModelFamily family, double alpha,
                       const FitConfig& config) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("fit_two_step: alpha must lie in (0,1)");
  }
  return finish_fit(series, estimate_theta(series, family, config), alpha);
}

VarEstimate var_point_estimate(const FitResult& fit) {
  double sigma_next = fit.sigma_path.sigmas.back();
  return VarEstimate{-fit.xi_hat * sigma_next, fit.alpha, sigma_next, fit.xi_hat};
}

Eigen::VectorXd qml_score(const FitResult& fit) {
  const auto n = static_cast<Eigen::Index>(fit.residuals.size());
  Eigen::VectorXd score = Eigen::VectorXd::Zero(fit.d_hats.rows());
  for (Eigen::Index t = 0; t < n; ++t) {
    double e = fit.residuals[static_cast<std::size_t>(t)];
    score += fit.d_hats.col(t) * (e * e - 1.0);
  }
  return score / static_cast<double>(n);
}

}  // namespace varboot
