#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "varboot/distributions.hpp"

namespace varboot {

/// Hard floor on filtered/simulated volatilities; keeps 1/sigma and
/// log(sigma) finite during optimizer excursions near the boundary.
inline constexpr double kSigmaFloor = 1e-12;

/// GARCH(1,1): sigma_{t+1}^2 = omega + alpha * eps_t^2 + beta * sigma_t^2.
/// Parameter ordering (omega, alpha, beta) is fixed for all gradient and
/// matrix code.
struct Garch11Params {
  double omega;
  double alpha;
  double beta;
};

/// T-GARCH(1,1): sigma_{t+1} = omega + alpha_plus * eps_t^+
///                            + alpha_minus * eps_t^- + beta * sigma_t.
/// Ordering (omega, alpha_plus, alpha_minus, beta).
struct TGarch11Params {
  double omega;
  double alpha_plus;
  double alpha_minus;
  double beta;
};

using ModelSpec = std::variant<Garch11Params, TGarch11Params>;

enum class ModelFamily { Garch11, TGarch11 };

/// Throws std::invalid_argument when the parameter boxes are violated
/// (omega > 0, alphas >= 0, 0 <= beta < 1).
void validate(const ModelSpec& spec);

ModelFamily family_of(const ModelSpec& spec);
std::string family_name(ModelFamily family);
ModelFamily family_from_name(const std::string& name);

/// Number of parameters r: 3 for GARCH, 4 for T-GARCH.
int param_count(const ModelSpec& spec);
int param_count(ModelFamily family);

Eigen::VectorXd to_param_vector(const ModelSpec& spec);
ModelSpec spec_from_vector(ModelFamily family, const Eigen::VectorXd& theta);

/// Log-returns eps_1..eps_n.
struct ReturnSeries {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

/// Rejects non-finite entries; `min_n` guards estimation entry points.
void validate(const ReturnSeries& series, std::size_t min_n = 1);

/// Truncated volatility path sigma~_1 .. sigma~_{n+1} (n+1 entries, all
/// clamped at kSigmaFloor) plus the value used at t = 1.
/// `init_overridden` marks a caller-supplied constant start (test hook);
/// the default start is theta-dependent and carries a gradient.
struct SigmaPath {
  std::vector<double> sigmas;
  double init_value;
  bool init_overridden = false;
};

/// Sample moments standing in for the constant presample: mean eps^2 for
/// the squared-scale recursion, mean eps^+/- for the threshold one.
struct Presample {
  double mean_sq;
  double mean_plus;
  double mean_minus;
};

Presample compute_presample(std::span<const double> returns);

/// Default start of the truncated filter: the stationary point of the
/// recursion driven by the constant presample, i.e.
/// sigma~_1^2 = (omega + alpha m2)/(1 - beta) for GARCH and
/// sigma~_1 = (omega + alpha+ m+ + alpha- m-)/(1 - beta) for T-GARCH.
/// Linear-homogeneous in the scale parameters, which keeps the residual
/// unit-mean-square identity exact at interior optima; equals the
/// unconditional level when evaluated at the truth.
double default_init_sigma(const ModelSpec& spec, const Presample& presample);

double filter_init_sigma(const ModelSpec& spec, const ReturnSeries& series);

/// Truncated volatility filter (unknown presample replaced by constants):
/// returns sigma~_1..sigma~_{n+1} under `spec`. `init_sigma1` overrides the
/// default initialization (test hook).
SigmaPath filter_sigma(const ModelSpec& spec, const ReturnSeries& series,
                       std::optional<double> init_sigma1 = std::nullopt);

/// Allocation-free core used by the likelihood hot path: writes n+1 sigmas
/// into `out` (must have size n+1).
void filter_sigma_into(const ModelSpec& spec, std::span<const double> returns,
                       double init_sigma1, std::span<double> out);

/// Analytic gradients d sigma~_t / d theta for t = 1..n+1 as an
/// r x (n+1) matrix. With the default initialization the t = 1 column is
/// the derivative of the presample stationary point; an overridden init is
/// a constant (zero gradient). `path` must come from filter_sigma on the
/// same inputs.
Eigen::MatrixXd sigma_gradient(const ModelSpec& spec, const ReturnSeries& series,
                               const SigmaPath& path);

struct SimulatedPath {
  ReturnSeries returns;          // eps_1..eps_n
  double true_sigma_next;        // sigma_{n+1}(theta_0)
  std::vector<double> true_sigmas;  // sigma_1..sigma_{n+1}
};

/// Exact recursion driven by the supplied innovations, starting at
/// `sigma_start`; returns all n returns and n+1 sigmas. Test hook and
/// backend of simulate_path.
SimulatedPath simulate_from_innovations(const ModelSpec& spec,
                                        std::span<const double> innovations,
                                        double sigma_start);

/// Simulates eps_1..eps_n after `burn_in` discarded observations; the
/// recursion starts at the unconditional level (falls back to omega-only
/// when alpha + beta >= 1). Deterministic given seed.
SimulatedPath simulate_path(const ModelSpec& spec, const InnovationDist& dist,
                            std::size_t n, std::size_t burn_in, std::uint64_t seed);

}  // namespace varboot
