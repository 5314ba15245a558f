#pragma once

#include <optional>
#include <string>
#include <vector>

#include "varboot/asymptotics.hpp"
#include "varboot/bootstrap.hpp"
#include "varboot/csv_io.hpp"

namespace varboot {

/// Rolling-window protocol: window w fits returns [w, w + window_n) and
/// reports the next-day VaR estimate with its RT bootstrap interval.
struct RollingConfig {
  std::size_t window_n;
  std::size_t steps;
  ModelFamily family = ModelFamily::TGarch11;
  double alpha = 0.05;
  double gamma = 0.05;
  BootstrapConfig bootstrap{};
  bool include_asymptotic = false;
  FitConfig fit_config{};
};

struct WindowRecord {
  std::size_t window = 0;  // 0-based index; window w starts at return w
  std::string date;        // date of the forecast-target return
  bool ok = false;
  std::string error;       // set when ok is false
  double var_hat = 0.0;
  double rt_lo = 0.0;
  double rt_hi = 0.0;
  std::optional<double> asy_lo;
  std::optional<double> asy_hi;
  std::vector<double> theta_hat;
};

/// Windows run in parallel with per-window seeds derived from
/// (bootstrap.base_seed, window index); consecutive windows share
/// window_n - 1 returns. Per-window failures are flagged, not fatal.
std::vector<WindowRecord> rolling_var(const PriceSeries& prices,
                                      const RollingConfig& config,
                                      std::size_t threads = 0);

std::vector<WindowRecord> rolling_var(const DatedReturns& returns,
                                      const RollingConfig& config,
                                      std::size_t threads = 0);

}  // namespace varboot
