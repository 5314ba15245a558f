#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "varboot/model.hpp"

namespace varboot {

/// Box and stopping controls for the QML search.
struct FitConfig {
  int max_iterations = 5000;
  double tolerance = 1e-9;
  int restarts = 3;  // moment-based start plus perturbed starts
  double beta_upper = 0.999;
  double omega_lower = 1e-10;
  double omega_upper = 1e8;
  double alpha_upper = 100.0;
};

void validate(const FitConfig& config);

struct FitDiagnostics {
  int iterations = 0;
  double objective = 0.0;
  bool converged = false;           // search converged and theta is interior
  bool boundary_contact = false;    // some component sits on its box bound
  std::vector<int> contacts;        // indices of parameters touching a bound
  bool xi_nonnegative = false;      // quantile came out >= 0 (flagged, not fatal)
};

struct ThetaEstimate {
  ModelSpec spec;
  FitDiagnostics diagnostics;
};

/// Two-step fit: theta by Gaussian QML, xi by the residual empirical
/// quantile. d_hats holds D^_t = (1/sigma~_t) d sigma~_t / d theta for
/// t = 1..n+1 as columns of an r x (n+1) matrix.
struct FitResult {
  ModelSpec theta_hat;
  std::vector<double> residuals;  // eta^_t = eps_t / sigma~_t(theta^)
  double xi_hat = 0.0;
  double alpha = 0.0;
  SigmaPath sigma_path;  // at theta^
  Eigen::MatrixXd d_hats;
  double loglik = 0.0;
  bool converged = false;
  FitDiagnostics diagnostics;
};

struct VarEstimate {
  double value;       // -xi^ * sigma~_{n+1}
  double alpha;
  double sigma_next;  // sigma~_{n+1}(theta^)
  double xi_hat;
};

/// Gaussian quasi-likelihood L~_n(theta) =
/// (1/n) sum [ -(eps_t/sigma~_t)^2/2 - log sigma~_t ] with the truncated
/// filter. Finite for any admissible theta thanks to the volatility floor.
/// `init_sigma1` pins the filter start (test hook).
double qml_objective(const ModelSpec& spec, const ReturnSeries& series,
                     std::optional<double> init_sigma1 = std::nullopt);

/// Same criterion with the filter driven by `filter_series` and the
/// residual numerator by `response_series` (the fixed-design bootstrap
/// reuses the original history while scoring resampled returns).
double qml_objective_mixed(const ModelSpec& spec, const ReturnSeries& filter_series,
                           const ReturnSeries& response_series);

/// QML maximization over the box via Nelder-Mead on transformed
/// coordinates (log omega, log-shifted alphas, logistic beta). Never
/// throws on non-convergence: returns the best point found with
/// diagnostics.converged = false.
ThetaEstimate estimate_theta(const ReturnSeries& series, ModelFamily family,
                             const FitConfig& config = {});

/// Warm-started variant used by the bootstrap: single start at
/// `warm_start` (falls back to the full multistart search if that run
/// fails to converge). Filter and response series may differ.
ThetaEstimate estimate_theta_warm(const ReturnSeries& filter_series,
                                  const ReturnSeries& response_series,
                                  const ModelSpec& warm_start,
                                  const FitConfig& config = {});

/// k-th smallest with k = ceil(n * alpha): the generalized inverse of the
/// residual edf, which minimizes the asymmetric absolute loss with ties
/// broken toward the smaller minimizer.
double empirical_quantile(std::span<const double> values, double alpha);

FitResult fit_two_step(const ReturnSeries& series, ModelFamily family, double alpha,
                       const FitConfig& config = {});

/// Assembles a FitResult (residuals, quantile, gradients) for a given
/// theta; backbone of fit_two_step and the bootstrap replicates.
FitResult finish_fit(const ReturnSeries& series, const ThetaEstimate& estimate,
                     double alpha);

VarEstimate var_point_estimate(const FitResult& fit);

/// QML score (1/n) sum D^_t (eta^_t^2 - 1); vanishes at interior optima.
Eigen::VectorXd qml_score(const FitResult& fit);

/// Componentwise projection onto the FitConfig box.
Eigen::VectorXd clamp_to_box(Eigen::VectorXd theta, const FitConfig& config);

}  // namespace varboot
