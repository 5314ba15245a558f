#include "varboot/model.hpp"

#include <cmath>
#include <stdexcept>

#include "varboot/rng.hpp"

namespace varboot {

namespace {

constexpr double kSigmaFloorSq = kSigmaFloor * kSigmaFloor;

}  // namespace

Presample compute_presample(std::span<const double> returns) {
  Presample p{0.0, 0.0, 0.0};
  for (double v : returns) {
    p.mean_sq += v * v;
    if (v > 0.0) {
      p.mean_plus += v;
    } else {
      p.mean_minus -= v;
    }
  }
  if (!returns.empty()) {
    const auto n = static_cast<double>(returns.size());
    p.mean_sq /= n;
    p.mean_plus /= n;
    p.mean_minus /= n;
  }
  return p;
}

double default_init_sigma(const ModelSpec& spec, const Presample& presample) {
  if (const auto* g = std::get_if<Garch11Params>(&spec)) {
    double sq = (g->omega + g->alpha * presample.mean_sq) / (1.0 - g->beta);
    return std::sqrt(std::max(sq, kSigmaFloorSq));
  }
  const auto& t = std::get<TGarch11Params>(spec);
  double s = (t.omega + t.alpha_plus * presample.mean_plus +
              t.alpha_minus * presample.mean_minus) /
             (1.0 - t.beta);
  return std::max(s, kSigmaFloor);
}

void validate(const ModelSpec& spec) {
  auto check = [](double omega, double beta, bool alphas_ok, const char* what) {
    if (!(omega > 0.0) || !std::isfinite(omega)) {
      throw std::invalid_argument(std::string(what) + ": omega must be positive");
    }
    if (!alphas_ok) {
      throw std::invalid_argument(std::string(what) + ": alpha must be non-negative");
    }
    if (!(beta >= 0.0 && beta < 1.0)) {
      throw std::invalid_argument(std::string(what) + ": beta must lie in [0,1)");
    }
  };
  if (const auto* g = std::get_if<Garch11Params>(&spec)) {
    check(g->omega, g->beta, g->alpha >= 0.0 && std::isfinite(g->alpha), "Garch11");
  } else {
    const auto& t = std::get<TGarch11Params>(spec);
    bool ok = t.alpha_plus >= 0.0 && t.alpha_minus >= 0.0 &&
              std::isfinite(t.alpha_plus) && std::isfinite(t.alpha_minus);
    check(t.omega, t.beta, ok, "TGarch11");
  }
}

ModelFamily family_of(const ModelSpec& spec) {
  return std::holds_alternative<Garch11Params>(spec) ? ModelFamily::Garch11
                                                     : ModelFamily::TGarch11;
}

std::string family_name(ModelFamily family) {
  return family == ModelFamily::Garch11 ? "garch" : "tgarch";
}

ModelFamily family_from_name(const std::string& name) {
  if (name == "garch") return ModelFamily::Garch11;
  if (name == "tgarch") return ModelFamily::TGarch11;
  throw std::invalid_argument("unknown model family: " + name);
}

int param_count(const ModelSpec& spec) { return param_count(family_of(spec)); }

int param_count(ModelFamily family) {
  return family == ModelFamily::Garch11 ? 3 : 4;
}

Eigen::VectorXd to_param_vector(const ModelSpec& spec) {
  if (const auto* g = std::get_if<Garch11Params>(&spec)) {
    Eigen::VectorXd v(3);
    v << g->omega, g->alpha, g->beta;
    return v;
  }
  const auto& t = std::get<TGarch11Params>(spec);
  Eigen::VectorXd v(4);
  v << t.omega, t.alpha_plus, t.alpha_minus, t.beta;
  return v;
}

ModelSpec spec_from_vector(ModelFamily family, const Eigen::VectorXd& theta) {
  if (family == ModelFamily::Garch11) {
    if (theta.size() != 3) throw std::invalid_argument("garch expects 3 parameters");
    return Garch11Params{theta[0], theta[1], theta[2]};
  }
  if (theta.size() != 4) throw std::invalid_argument("tgarch expects 4 parameters");
  return TGarch11Params{theta[0], theta[1], theta[2], theta[3]};
}

void validate(const ReturnSeries& series, std::size_t min_n) {
  if (series.size() < min_n) {
    throw std::invalid_argument("return series too short (n = " +
                                std::to_string(series.size()) + ", need >= " +
                                std::to_string(min_n) + ")");
  }
  for (double v : series.values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("return series contains a non-finite value");
    }
  }
}

double filter_init_sigma(const ModelSpec& spec, const ReturnSeries& series) {
  return default_init_sigma(spec, compute_presample(series.values));
}

void filter_sigma_into(const ModelSpec& spec, std::span<const double> returns,
                       double init_sigma1, std::span<double> out) {
  const std::size_t n = returns.size();
  if (out.size() != n + 1) {
    throw std::invalid_argument("filter_sigma_into: output span must have n+1 slots");
  }
  if (const auto* g = std::get_if<Garch11Params>(&spec)) {
    double s2 = std::max(init_sigma1 * init_sigma1, kSigmaFloorSq);
    out[0] = std::sqrt(s2);
    for (std::size_t t = 0; t < n; ++t) {
      s2 = g->omega + g->alpha * returns[t] * returns[t] + g->beta * s2;
      if (s2 < kSigmaFloorSq) s2 = kSigmaFloorSq;
      out[t + 1] = std::sqrt(s2);
    }
  } else {
    const auto& tg = std::get<TGarch11Params>(spec);
    double s = std::max(init_sigma1, kSigmaFloor);
    out[0] = s;
    for (std::size_t t = 0; t < n; ++t) {
      double eps_plus = returns[t] > 0.0 ? returns[t] : 0.0;
      double eps_minus = returns[t] < 0.0 ? -returns[t] : 0.0;
      s = tg.omega + tg.alpha_plus * eps_plus + tg.alpha_minus * eps_minus + tg.beta * s;
      if (s < kSigmaFloor) s = kSigmaFloor;
      out[t + 1] = s;
    }
  }
}

SigmaPath filter_sigma(const ModelSpec& spec, const ReturnSeries& series,
                       std::optional<double> init_sigma1) {
  validate(spec);
  validate(series, 1);
  double init = init_sigma1.value_or(filter_init_sigma(spec, series));
  SigmaPath path;
  path.init_value = std::max(init, kSigmaFloor);
  path.init_overridden = init_sigma1.has_value();
  path.sigmas.resize(series.size() + 1);
  filter_sigma_into(spec, series.values, path.init_value, path.sigmas);
  return path;
}

Eigen::MatrixXd sigma_gradient(const ModelSpec& spec, const ReturnSeries& series,
                               const SigmaPath& path) {
  const std::size_t n = series.size();
  if (path.sigmas.size() != n + 1) {
    throw std::invalid_argument("sigma_gradient: path does not match series");
  }
  const int r = param_count(spec);
  Eigen::MatrixXd grad(r, static_cast<Eigen::Index>(n + 1));
  const Presample pre =
      path.init_overridden ? Presample{0.0, 0.0, 0.0} : compute_presample(series.values);
  if (const auto* g = std::get_if<Garch11Params>(&spec)) {
    // Squared-scale recursion, then d sigma = d sigma^2 / (2 sigma).
    Eigen::Vector3d g2 = Eigen::Vector3d::Zero();
    if (!path.init_overridden) {
      // stationary presample point: g = (1, m2, sigma^2_1) + beta g
      double init_sq = path.sigmas[0] * path.sigmas[0];
      g2 = Eigen::Vector3d(1.0, pre.mean_sq, init_sq) / (1.0 - g->beta);
    }
    grad.col(0) = g2 / (2.0 * path.sigmas[0]);
    for (std::size_t t = 1; t <= n; ++t) {
      double eps = series.values[t - 1];
      double prev_sq = path.sigmas[t - 1] * path.sigmas[t - 1];
      Eigen::Vector3d step(1.0, eps * eps, prev_sq);
      g2 = step + g->beta * g2;
      grad.col(static_cast<Eigen::Index>(t)) = g2 / (2.0 * path.sigmas[t]);
    }
  } else {
    const auto& tg = std::get<TGarch11Params>(spec);
    Eigen::Vector4d gv = Eigen::Vector4d::Zero();
    if (!path.init_overridden) {
      gv = Eigen::Vector4d(1.0, pre.mean_plus, pre.mean_minus, path.sigmas[0]) /
           (1.0 - tg.beta);
    }
    grad.col(0) = gv;
    for (std::size_t t = 1; t <= n; ++t) {
      double eps = series.values[t - 1];
      double eps_plus = eps > 0.0 ? eps : 0.0;
      double eps_minus = eps < 0.0 ? -eps : 0.0;
      Eigen::Vector4d step(1.0, eps_plus, eps_minus, path.sigmas[t - 1]);
      gv = step + tg.beta * gv;
      grad.col(static_cast<Eigen::Index>(t)) = gv;
    }
  }
  return grad;
}

SimulatedPath simulate_from_innovations(const ModelSpec& spec,
                                        std::span<const double> innovations,
                                        double sigma_start) {
  validate(spec);
  const std::size_t n = innovations.size();
  if (n == 0) throw std::invalid_argument("simulate_from_innovations: need n >= 1");
  SimulatedPath out;
  out.returns.values.resize(n);
  out.true_sigmas.resize(n + 1);
  if (const auto* g = std::get_if<Garch11Params>(&spec)) {
    double s2 = std::max(sigma_start * sigma_start, kSigmaFloorSq);
    for (std::size_t t = 0; t < n; ++t) {
      double sigma = std::sqrt(s2);
      out.true_sigmas[t] = sigma;
      double eps = sigma * innovations[t];
      out.returns.values[t] = eps;
      s2 = g->omega + g->alpha * eps * eps + g->beta * s2;
      if (s2 < kSigmaFloorSq) s2 = kSigmaFloorSq;
    }
    out.true_sigmas[n] = std::sqrt(s2);
  } else {
    const auto& tg = std::get<TGarch11Params>(spec);
    double s = std::max(sigma_start, kSigmaFloor);
    for (std::size_t t = 0; t < n; ++t) {
      out.true_sigmas[t] = s;
      double eps = s * innovations[t];
      out.returns.values[t] = eps;
      double eps_plus = eps > 0.0 ? eps : 0.0;
      double eps_minus = eps < 0.0 ? -eps : 0.0;
      s = tg.omega + tg.alpha_plus * eps_plus + tg.alpha_minus * eps_minus + tg.beta * s;
      if (s < kSigmaFloor) s = kSigmaFloor;
    }
    out.true_sigmas[n] = s;
  }
  out.true_sigma_next = out.true_sigmas[n];
  return out;
}

SimulatedPath simulate_path(const ModelSpec& spec, const InnovationDist& dist,
                            std::size_t n, std::size_t burn_in, std::uint64_t seed) {
  validate(spec);
  validate(dist);
  if (n == 0) throw std::invalid_argument("simulate_path: need n >= 1");

  double sigma_start;
  if (const auto* g = std::get_if<Garch11Params>(&spec)) {
    sigma_start = (g->alpha + g->beta < 1.0)
                      ? std::sqrt(g->omega / (1.0 - g->alpha - g->beta))
                      : kSigmaFloor;  // stationary level undefined; burn-in recovers
  } else {
    const auto& tg = std::get<TGarch11Params>(spec);
    sigma_start = tg.omega / (1.0 - tg.beta);
  }

  SplitMix64 rng(seed);
  // burn_in + n + 1 draws; the final one is not consumed by the recursion.
  std::vector<double> innovations(burn_in + n + 1);
  for (double& eta : innovations) eta = draw_innovation(dist, rng);
  innovations.pop_back();

  SimulatedPath full = simulate_from_innovations(spec, innovations, sigma_start);
  if (burn_in == 0) return full;

  SimulatedPath out;
  out.returns.values.assign(full.returns.values.begin() + static_cast<long>(burn_in),
                            full.returns.values.end());
  out.true_sigmas.assign(full.true_sigmas.begin() + static_cast<long>(burn_in),
                         full.true_sigmas.end());
  out.true_sigma_next = full.true_sigma_next;
  return out;
}

}  // namespace varboot
