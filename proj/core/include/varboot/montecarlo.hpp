#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "varboot/bootstrap.hpp"
#include "varboot/distributions.hpp"
#include "varboot/model.hpp"

namespace varboot {

/// One coverage experiment: S independent simulated paths, the full
/// two-step + bootstrap pipeline on each, aggregated per interval type.
struct ExperimentConfig {
  ModelSpec spec;
  InnovationDist dist = StandardNormal{};
  std::size_t n = 500;
  double alpha = 0.05;
  double gamma = 0.10;           // 1 - nominal coverage
  std::size_t s_sims = 200;
  BootstrapConfig bootstrap{};
  bool include_asymptotic = false;
  std::uint64_t master_seed = 0;
  std::size_t burn_in = 1000;
  FitConfig fit_config{};
};

void validate(const ExperimentConfig& config);

/// The four simulation presets: garch-high, garch-low, tgarch-high,
/// tgarch-low (omega = 0.05*20^2/252 resp. 0.05*20/sqrt(252)).
ModelSpec preset_spec(const std::string& name);
std::vector<std::string> preset_names();

struct IntervalStats {
  double avg_coverage = 0.0;  // percent
  double below = 0.0;         // percent, true VaR under the interval
  double above = 0.0;         // percent
  double avg_length = 0.0;
  std::size_t cover_count = 0;
  std::size_t below_count = 0;
  std::size_t above_count = 0;
};

struct CoverageReport {
  IntervalStats ep;
  IntervalStats rt;
  IntervalStats sy;
  std::optional<IntervalStats> asymptotic;
  double ep_rt_gap = 0.0;  // percentage points, rt - ep coverage
  std::size_t completed_sims = 0;
  std::size_t failed_sims = 0;
  double wall_time_seconds = 0.0;  // not serialized; timing only
};

CoverageReport run_experiment(const ExperimentConfig& config, std::size_t threads = 0);

struct GapRow {
  std::string label;
  double gap;  // percentage points
};

/// Table-5 style gap summary (RT minus EP coverage per report).
std::vector<GapRow> gap_table(const std::map<std::string, CoverageReport>& reports);

/// JSON form without wall_time so repeated runs are byte-identical.
std::string report_to_json(const CoverageReport& report, int indent = 2);

/// Aligned text table (coverage / below/above / length per interval type).
std::string report_to_table(const CoverageReport& report);

}  // namespace varboot
