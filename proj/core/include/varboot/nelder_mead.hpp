#pragma once

#include <functional>

#include <Eigen/Core>

namespace varboot {

struct NelderMeadOptions {
  int max_iterations = 5000;
  double f_tolerance = 1e-9;
  double initial_step = 0.2;
  /// After convergence the simplex is re-seeded at the incumbent and the
  /// search repeated until no cycle improves by more than f_tolerance.
  int max_cycles = 3;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double f_min = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Downhill simplex minimization (reflection 1, expansion 2, contraction
/// 0.5, shrink 0.5). Deterministic for identical inputs.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0,
                             const NelderMeadOptions& options = {});

}  // namespace varboot
