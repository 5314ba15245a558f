#include "varboot/rolling.hpp"

#include <stdexcept>

#include "varboot/parallel.hpp"
#include "varboot/rng.hpp"

namespace varboot {

std::vector<WindowRecord> rolling_var(const PriceSeries& prices,
                                      const RollingConfig& config,
                                      std::size_t threads) {
  return rolling_var(to_dated_returns(prices), config, threads);
}

std::vector<WindowRecord> rolling_var(const DatedReturns& returns,
                                      const RollingConfig& config,
                                      std::size_t threads) {
  const std::size_t m = returns.returns.size();
  if (config.window_n + config.steps > m) {
    throw std::invalid_argument(
        "rolling_var: window_n + steps exceeds the return series length");
  }
  if (config.steps == 0) {
    throw std::invalid_argument("rolling_var: steps must be >= 1");
  }

  std::vector<WindowRecord> records(config.steps);
  parallel_for(
      config.steps,
      [&](std::size_t w) {
        WindowRecord& rec = records[w];
        rec.window = w;
        rec.date = returns.dates[w + config.window_n];
        try {
          ReturnSeries window;
          window.values.assign(
              returns.returns.values.begin() + static_cast<long>(w),
              returns.returns.values.begin() + static_cast<long>(w + config.window_n));

          FitResult fit =
              fit_two_step(window, config.family, config.alpha, config.fit_config);
          rec.var_hat = var_point_estimate(fit).value;
          Eigen::VectorXd theta = to_param_vector(fit.theta_hat);
          rec.theta_hat.assign(theta.data(), theta.data() + theta.size());

          BootstrapConfig boot = config.bootstrap;
          boot.base_seed = derive_stream(config.bootstrap.base_seed, w);
          BootstrapOutcome outcome =
              run_bootstrap(fit, window, config.alpha, boot, 1);
          IntervalSet intervals = build_intervals(outcome, config.gamma);
          rec.rt_lo = intervals.rt.lo;
          rec.rt_hi = intervals.rt.hi;

          if (config.include_asymptotic) {
            SigmaAlphaComponents comps = plug_in_components(fit, config.alpha);
            AsymptoticInterval asy = asymptotic_interval(fit, comps, config.gamma);
            rec.asy_lo = asy.lo;
            rec.asy_hi = asy.hi;
          }
          rec.ok = true;
        } catch (const std::exception& e) {
          rec.ok = false;
          rec.error = e.what();
        }
      },
      threads);
  return records;
}

}  // namespace varboot
