#pragma once

#include <functional>

namespace varboot {

/// Adaptive Gauss-Kronrod (G7,K15) integration of f over [a, b].
/// Bisects until the local K15-G7 error estimate meets the tolerance budget.
/// Throws std::runtime_error when the subdivision limit is hit.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-13, int max_depth = 60);

}  // namespace varboot
