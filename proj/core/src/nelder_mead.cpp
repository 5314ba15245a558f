#include "varboot/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace varboot {

namespace {

struct Simplex {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> values;

  void sort() {
    const std::size_t m = points.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<Eigen::VectorXd> p(m);
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) {
      p[i] = points[order[i]];
      v[i] = values[order[i]];
    }
    points.swap(p);
    values.swap(v);
  }
};

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0,
                             const NelderMeadOptions& options) {
  const int n = static_cast<int>(x0.size());
  NelderMeadResult result;
  result.x = x0;
  result.f_min = f(x0);
  result.iterations = 0;

  double step = options.initial_step;
  for (int cycle = 0; cycle < options.max_cycles; ++cycle) {
    Simplex s;
    s.points.reserve(n + 1);
    s.points.push_back(result.x);
    s.values.push_back(result.f_min);
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd p = result.x;
      p[j] += step;
      s.points.push_back(p);
      s.values.push_back(f(p));
    }
    s.sort();

    bool converged = false;
    while (result.iterations < options.max_iterations) {
      ++result.iterations;
      if (std::fabs(s.values[n] - s.values[0]) <
          options.f_tolerance * (1.0 + std::fabs(s.values[0]))) {
        converged = true;
        break;
      }
      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < n; ++i) centroid += s.points[i];
      centroid /= static_cast<double>(n);

      Eigen::VectorXd reflected = centroid + (centroid - s.points[n]);
      double f_reflected = f(reflected);
      if (f_reflected < s.values[0]) {
        Eigen::VectorXd expanded = centroid + 2.0 * (centroid - s.points[n]);
        double f_expanded = f(expanded);
        if (f_expanded < f_reflected) {
          s.points[n] = expanded;
          s.values[n] = f_expanded;
        } else {
          s.points[n] = reflected;
          s.values[n] = f_reflected;
        }
      } else if (f_reflected < s.values[n - 1]) {
        s.points[n] = reflected;
        s.values[n] = f_reflected;
      } else {
        bool outside = f_reflected < s.values[n];
        Eigen::VectorXd contracted;
        if (outside) {
          contracted = centroid + 0.5 * (reflected - centroid);
        } else {
          contracted = centroid - 0.5 * (centroid - s.points[n]);
        }
        double f_contracted = f(contracted);
        if (f_contracted < std::min(f_reflected, s.values[n])) {
          s.points[n] = contracted;
          s.values[n] = f_contracted;
        } else {
          for (int i = 1; i <= n; ++i) {
            s.points[i] = s.points[0] + 0.5 * (s.points[i] - s.points[0]);
            s.values[i] = f(s.points[i]);
          }
        }
      }
      s.sort();
    }

    double improvement = result.f_min - s.values[0];
    if (s.values[0] < result.f_min) {
      result.f_min = s.values[0];
      result.x = s.points[0];
    }
    result.converged = converged;
    if (!converged) break;  // iteration budget exhausted
    if (cycle > 0 && improvement < options.f_tolerance * (1.0 + std::fabs(result.f_min))) {
      break;
    }
    step *= 0.25;  // tighter simplex around the incumbent
  }
  return result;
}

}  // namespace varboot
