#include "varboot/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "varboot/quadrature.hpp"

namespace varboot {

namespace {

double lambda_formula(double xi, double kappa, double p, double f) {
  return xi * (kappa - 1.0) / 4.0 + p / (2.0 * f);
}

double zeta_formula(double xi, double kappa, double p, double f, double alpha) {
  return xi * xi * (kappa - 1.0) / 4.0 + xi * p / f +
         alpha * (1.0 - alpha) / (f * f);
}

Eigen::MatrixXd inverse_spd(const Eigen::MatrixXd& j_mat) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(j_mat);
  double lo = eig.eigenvalues().minCoeff();
  double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12) {
    throw std::runtime_error("sigma_alpha_matrix: J is ill-conditioned (condition "
                             "number " + std::to_string(hi / std::max(lo, 1e-300)) + ")");
  }
  return j_mat.ldlt().solve(Eigen::MatrixXd::Identity(j_mat.rows(), j_mat.cols()));
}

}  // namespace

double uniform_kde(std::span<const double> values, double x, double bandwidth) {
  if (values.empty() || !(bandwidth > 0.0)) {
    throw std::invalid_argument("uniform_kde: need data and a positive bandwidth");
  }
  std::size_t inside = 0;
  for (double v : values) {
    if (std::fabs(x - v) <= bandwidth) ++inside;
  }
  return 0.5 * static_cast<double>(inside) /
         (static_cast<double>(values.size()) * bandwidth);
}

double estimate_kappa(std::span<const double> residuals) {
  double acc = 0.0;
  for (double e : residuals) acc += e * e * e * e;
  return acc / static_cast<double>(residuals.size());
}

double estimate_p_alpha(std::span<const double> residuals, double xi, double alpha) {
  double acc = 0.0;
  for (double e : residuals) {
    if (e < xi) acc += e * e;
  }
  return acc / static_cast<double>(residuals.size()) - alpha;
}

double kde_bandwidth(std::span<const double> residuals, double exponent) {
  if (!(exponent > 0.0 && exponent <= 0.5)) {
    throw std::invalid_argument("kde_bandwidth: exponent must lie in (0, 0.5]");
  }
  const auto n = static_cast<double>(residuals.size());
  double mean = 0.0;
  for (double e : residuals) mean += e;
  mean /= n;
  double var = 0.0;
  for (double e : residuals) var += (e - mean) * (e - mean);
  var /= n;
  return 1.06 * std::sqrt(var) * std::pow(n, -exponent);
}

SigmaAlphaComponents plug_in_components(const FitResult& fit, double alpha,
                                        double bandwidth_exponent) {
  const auto n = static_cast<Eigen::Index>(fit.residuals.size());
  if (n == 0) throw std::invalid_argument("plug_in_components: empty fit");

  SigmaAlphaComponents c;
  c.alpha = alpha;
  c.xi = fit.xi_hat;
  c.kappa = estimate_kappa(fit.residuals);
  c.p_alpha = estimate_p_alpha(fit.residuals, fit.xi_hat, alpha);

  // Omega^ and J^ average D^_t over t = 1..n (the n+1 column is the
  // one-step-ahead gradient and stays out of the moment estimates).
  c.omega_vec = Eigen::VectorXd::Zero(fit.d_hats.rows());
  c.j_mat = Eigen::MatrixXd::Zero(fit.d_hats.rows(), fit.d_hats.rows());
  for (Eigen::Index t = 0; t < n; ++t) {
    c.omega_vec += fit.d_hats.col(t);
    c.j_mat += fit.d_hats.col(t) * fit.d_hats.col(t).transpose();
  }
  c.omega_vec /= static_cast<double>(n);
  c.j_mat /= static_cast<double>(n);

  double h = kde_bandwidth(fit.residuals, bandwidth_exponent);
  c.f_xi = uniform_kde(fit.residuals, fit.xi_hat, h);
  if (!(c.f_xi > 0.0)) {
    throw std::runtime_error(
        "plug_in_components: kernel density estimate at xi^ is zero; "
        "enlarge the bandwidth (smaller exponent)");
  }
  c.lambda_alpha = lambda_formula(c.xi, c.kappa, c.p_alpha, c.f_xi);
  c.zeta_alpha = zeta_formula(c.xi, c.kappa, c.p_alpha, c.f_xi, alpha);
  return c;
}

PopulationComponents population_components(const InnovationDist& dist, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("population_components: alpha must lie in (0,1)");
  }
  validate(dist);
  PopulationComponents c;
  c.kappa = innovation_kurtosis(dist);
  c.xi = innovation_quantile(dist, alpha);
  c.f_xi = innovation_pdf(dist, c.xi);
  // E[eta^2 1{eta < xi}] by quadrature; unit-variance laws make the
  // contribution below xi - 40 negligible.
  double second_moment = integrate(
      [&dist](double x) { return x * x * innovation_pdf(dist, x); }, c.xi - 40.0,
      c.xi, 1e-13);
  c.p_alpha = second_moment - alpha;
  c.lambda_alpha = lambda_formula(c.xi, c.kappa, c.p_alpha, c.f_xi);
  c.zeta_alpha = zeta_formula(c.xi, c.kappa, c.p_alpha, c.f_xi, alpha);
  return c;
}

SigmaAlphaMatrix sigma_alpha_matrix(const SigmaAlphaComponents& components) {
  const Eigen::Index r = components.j_mat.rows();
  if (components.j_mat.cols() != r || components.omega_vec.size() != r) {
    throw std::invalid_argument("sigma_alpha_matrix: inconsistent component shapes");
  }
  Eigen::MatrixXd j_inv = inverse_spd(components.j_mat);
  Eigen::MatrixXd m(r + 1, r + 1);
  m.topLeftCorner(r, r) = ((components.kappa - 1.0) / 4.0) * j_inv;
  Eigen::VectorXd cross = components.lambda_alpha * (j_inv * components.omega_vec);
  m.topRightCorner(r, 1) = cross;
  m.bottomLeftCorner(1, r) = cross.transpose();
  m(r, r) = components.zeta_alpha;
  m = 0.5 * (m + m.transpose()).eval();
  return SigmaAlphaMatrix{std::move(m)};
}

AsymptoticInterval asymptotic_interval(const FitResult& fit,
                                       const SigmaAlphaComponents& components,
                                       double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("asymptotic_interval: gamma must lie in (0,1)");
  }
  const auto n = static_cast<double>(fit.residuals.size());
  const double sigma_next = fit.sigma_path.sigmas.back();
  const Eigen::Index r = fit.d_hats.rows();

  // d sigma~_{n+1}/d theta = sigma~_{n+1} * D^_{n+1}
  Eigen::VectorXd v(r + 1);
  v.head(r) = -fit.xi_hat * sigma_next * fit.d_hats.col(fit.d_hats.cols() - 1);
  v[r] = sigma_next;

  SigmaAlphaMatrix sigma = sigma_alpha_matrix(components);
  double quad = v.dot(sigma.mat * v);
  bool clamped = false;
  if (quad < 0.0) {
    quad = 0.0;
    clamped = true;
  }
  double z = normal_quantile(1.0 - gamma / 2.0);
  double half = z * std::sqrt(quad / n);
  double center = -fit.xi_hat * sigma_next;
  return AsymptoticInterval{center - half, center + half, half, clamped};
}

}  // namespace varboot
