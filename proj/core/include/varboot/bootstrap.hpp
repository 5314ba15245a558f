#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "varboot/estimation.hpp"

namespace varboot {

/// Fixed design keeps the bootstrap volatilities at the original series'
/// filtered path; recursive design regenerates them through the model
/// recursion applied to the bootstrap path itself.
enum class BootstrapDesign { Fixed, Recursive };

/// FullQmle re-maximizes the bootstrap criterion; NewtonRaphson takes the
/// one-step approximation theta^ + (1/2) J^{-1} (1/n) sum D_t (eta*^2 - 1).
enum class EstimatorMode { FullQmle, NewtonRaphson };

struct BootstrapConfig {
  BootstrapDesign design = BootstrapDesign::Fixed;
  EstimatorMode estimator_mode = EstimatorMode::FullQmle;
  std::size_t b_replicates = 499;
  std::uint64_t base_seed = 0;
  FitConfig fit_config{};
};

void validate(const BootstrapConfig& config);

struct Replicate {
  Eigen::VectorXd theta_star;
  double xi_star = 0.0;
  double var_star = 0.0;
  bool ok = false;
};

struct BootstrapOutcome {
  std::vector<double> var_stars;  // surviving replicates, replicate order
  std::vector<Eigen::VectorXd> theta_stars;
  std::vector<double> xi_stars;
  std::size_t n = 0;       // original sample size
  double var_hat = 0.0;    // centering point estimate
  std::size_t failed_count = 0;
};

struct Interval {
  double lo;
  double hi;
};

inline double length(const Interval& iv) { return iv.hi - iv.lo; }

/// Equal-tailed percentile, reversed-tails and symmetric bootstrap
/// intervals at level 1 - gamma. RT bounds are the raw VaR* order
/// statistics (reduced form); EP and SY are their reflections about
/// VaR^, computed in extended precision and rounded once.
struct IntervalSet {
  Interval ep;
  Interval rt;
  Interval sy;
  double gamma;
};

/// Draws eta*_1..eta*_n i.i.d. uniformly (with replacement) from the raw
/// residuals — no centering, no rescaling.
std::vector<double> resample_residuals(const FitResult& fit, std::uint64_t seed);

/// Deterministic replicate given the resampled innovations (test hook and
/// backend of the seeded entry points below).
Replicate replicate_from_innovations(const FitResult& fit, const ReturnSeries& series,
                                     double alpha, std::span<const double> eta_star,
                                     BootstrapDesign design, EstimatorMode mode,
                                     const FitConfig& fit_config = {});

Replicate fixed_design_replicate(const FitResult& fit, const ReturnSeries& series,
                                 double alpha, std::uint64_t seed, EstimatorMode mode,
                                 const FitConfig& fit_config = {});

Replicate recursive_design_replicate(const FitResult& fit, const ReturnSeries& series,
                                     double alpha, std::uint64_t seed,
                                     EstimatorMode mode,
                                     const FitConfig& fit_config = {});

/// B replicates with per-replicate streams derived from
/// (base_seed, replicate index); results are independent of thread
/// scheduling. Failed replicates are dropped and counted. Throws when
/// every replicate fails.
BootstrapOutcome run_bootstrap(const FitResult& fit, const ReturnSeries& series,
                               double alpha, const BootstrapConfig& config,
                               std::size_t threads = 0);

/// Needs at least 50 surviving replicates.
IntervalSet build_intervals(const BootstrapOutcome& outcome, double gamma);

}  // namespace varboot
