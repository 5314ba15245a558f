#pragma once

#include <span>

#include <Eigen/Core>

#include "varboot/distributions.hpp"
#include "varboot/estimation.hpp"

namespace varboot {

/// Ingredients of the joint asymptotic covariance of (theta^, xi^):
/// kappa = E eta^4, Omega = E D_t, J = E D_t D_t',
/// lambda_alpha = xi (kappa-1)/4 + p_alpha / (2 f(xi)),
/// zeta_alpha = xi^2 (kappa-1)/4 + xi p_alpha / f(xi) + alpha(1-alpha)/f(xi)^2,
/// p_alpha = E[eta^2 1{eta < xi}] - alpha.
struct SigmaAlphaComponents {
  double kappa;
  Eigen::VectorXd omega_vec;
  Eigen::MatrixXd j_mat;
  double p_alpha;
  double f_xi;
  double xi;
  double lambda_alpha;
  double zeta_alpha;
  double alpha;
};

/// The (r+1)x(r+1) block matrix: top-left ((kappa-1)/4) J^{-1}, corner
/// zeta_alpha, off-diagonals lambda_alpha J^{-1} Omega. Symmetrized by
/// averaging to kill round-off asymmetry.
struct SigmaAlphaMatrix {
  Eigen::MatrixXd mat;
};

/// Population-law components for a closed-form innovation distribution
/// (exact xi and f(xi); p_alpha by adaptive quadrature of x^2 f(x) over
/// [xi - 40, xi], the tail beyond being negligible at the tolerances used).
struct PopulationComponents {
  double kappa;
  double xi;
  double f_xi;
  double p_alpha;
  double lambda_alpha;
  double zeta_alpha;
};

/// Uniform-kernel density estimate (1/(n h)) sum (1/2) 1{|x - v_t| <= h}.
double uniform_kde(std::span<const double> values, double x, double bandwidth);

double estimate_kappa(std::span<const double> residuals);
double estimate_p_alpha(std::span<const double> residuals, double xi, double alpha);

/// Silverman-style bandwidth c * sd * n^{-exponent} with c = 1.06.
double kde_bandwidth(std::span<const double> residuals, double exponent);

/// Plug-in estimators of the asymptotic-covariance ingredients from a
/// converged fit. Throws std::runtime_error when the KDE at xi^ is zero
/// (bandwidth too small for the residual spread).
SigmaAlphaComponents plug_in_components(const FitResult& fit, double alpha,
                                        double bandwidth_exponent = 0.2);

PopulationComponents population_components(const InnovationDist& dist, double alpha);

/// Throws std::runtime_error when J is numerically singular
/// (condition number above 1e12).
SigmaAlphaMatrix sigma_alpha_matrix(const SigmaAlphaComponents& components);

struct AsymptoticInterval {
  double lo;
  double hi;
  double half_width;
  bool variance_clamped;  // negative quadratic form truncated at zero
};

/// Delta-method confidence interval for the conditional VaR at level
/// 1 - gamma: center -xi^ sigma~_{n+1}, half-width
/// z_{1-gamma/2}/sqrt(n) * sqrt(v' Sigma^ v) with
/// v = (-xi^ d sigma~_{n+1}/d theta, sigma~_{n+1}).
AsymptoticInterval asymptotic_interval(const FitResult& fit,
                                       const SigmaAlphaComponents& components,
                                       double gamma);

}  // namespace varboot
