#include "varboot/montecarlo.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "varboot/asymptotics.hpp"
#include "varboot/parallel.hpp"
#include "varboot/rng.hpp"

namespace varboot {

namespace {

struct SimRecord {
  bool ok = false;
  // -1 below, 0 inside, +1 above, per interval type
  int ep = 0;
  int rt = 0;
  int sy = 0;
  int asy = 0;
  double ep_len = 0.0;
  double rt_len = 0.0;
  double sy_len = 0.0;
  double asy_len = 0.0;
};

int classify(double true_var, double lo, double hi) {
  if (true_var < lo) return -1;
  if (true_var > hi) return 1;
  return 0;
}

void accumulate(IntervalStats& stats, int outcome, double len) {
  if (outcome < 0) {
    ++stats.below_count;
  } else if (outcome > 0) {
    ++stats.above_count;
  } else {
    ++stats.cover_count;
  }
  stats.avg_length += len;
}

void finalize(IntervalStats& stats, std::size_t completed) {
  if (completed == 0) return;
  const double m = static_cast<double>(completed);
  stats.avg_coverage = 100.0 * static_cast<double>(stats.cover_count) / m;
  stats.below = 100.0 * static_cast<double>(stats.below_count) / m;
  stats.above = 100.0 * static_cast<double>(stats.above_count) / m;
  stats.avg_length /= m;
}

nlohmann::ordered_json stats_to_json(const IntervalStats& s) {
  return nlohmann::ordered_json{{"avg_coverage", s.avg_coverage},
                                {"below", s.below},
                                {"above", s.above},
                                {"avg_length", s.avg_length},
                                {"cover_count", s.cover_count},
                                {"below_count", s.below_count},
                                {"above_count", s.above_count}};
}

}  // namespace

void validate(const ExperimentConfig& config) {
  validate(config.spec);
  validate(config.dist);
  validate(config.bootstrap);
  if (config.s_sims < 1) {
    throw std::invalid_argument("ExperimentConfig: s_sims must be >= 1");
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0) ||
      !(config.gamma > 0.0 && config.gamma < 1.0)) {
    throw std::invalid_argument("ExperimentConfig: alpha and gamma must lie in (0,1)");
  }
}

ModelSpec preset_spec(const std::string& name) {
  const double omega_garch = 0.05 * 20.0 * 20.0 / 252.0;
  const double omega_tgarch = 0.05 * 20.0 / std::sqrt(252.0);
  if (name == "garch-high") return Garch11Params{omega_garch, 0.15, 0.8};
  if (name == "garch-low") return Garch11Params{omega_garch, 0.4, 0.55};
  if (name == "tgarch-high") return TGarch11Params{omega_tgarch, 0.05, 0.10, 0.8};
  if (name == "tgarch-low") return TGarch11Params{omega_tgarch, 0.1, 0.3, 0.55};
  throw std::invalid_argument("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
  return {"garch-high", "garch-low", "tgarch-high", "tgarch-low"};
}

CoverageReport run_experiment(const ExperimentConfig& config, std::size_t threads) {
  validate(config);
  auto t0 = std::chrono::steady_clock::now();

  const double xi_pop = population_components(config.dist, config.alpha).xi;
  const ModelFamily family = family_of(config.spec);

  std::vector<SimRecord> records(config.s_sims);
  parallel_for(
      config.s_sims,
      [&](std::size_t s) {
        SimRecord& rec = records[s];
        try {
          std::uint64_t sim_seed = derive_stream(config.master_seed, s);
          SimulatedPath path = simulate_path(config.spec, config.dist, config.n,
                                             config.burn_in, derive_stream(sim_seed, 0));
          double true_var = -xi_pop * path.true_sigma_next;

          FitResult fit =
              fit_two_step(path.returns, family, config.alpha, config.fit_config);
          if (!fit.converged) return;  // counted as failed

          BootstrapConfig boot = config.bootstrap;
          boot.base_seed = derive_stream(sim_seed, 1);
          BootstrapOutcome outcome =
              run_bootstrap(fit, path.returns, config.alpha, boot, 1);
          IntervalSet intervals = build_intervals(outcome, config.gamma);

          rec.ep = classify(true_var, intervals.ep.lo, intervals.ep.hi);
          rec.rt = classify(true_var, intervals.rt.lo, intervals.rt.hi);
          rec.sy = classify(true_var, intervals.sy.lo, intervals.sy.hi);
          rec.ep_len = length(intervals.ep);
          rec.rt_len = length(intervals.rt);
          rec.sy_len = length(intervals.sy);

          if (config.include_asymptotic) {
            SigmaAlphaComponents comps = plug_in_components(fit, config.alpha);
            AsymptoticInterval asy = asymptotic_interval(fit, comps, config.gamma);
            rec.asy = classify(true_var, asy.lo, asy.hi);
            rec.asy_len = asy.hi - asy.lo;
          }
          rec.ok = true;
        } catch (const std::exception&) {
          rec.ok = false;  // failed sims are counted, never fatal
        }
      },
      threads);

  CoverageReport report;
  for (const SimRecord& rec : records) {
    if (!rec.ok) {
      ++report.failed_sims;
      continue;
    }
    ++report.completed_sims;
    accumulate(report.ep, rec.ep, rec.ep_len);
    accumulate(report.rt, rec.rt, rec.rt_len);
    accumulate(report.sy, rec.sy, rec.sy_len);
    if (config.include_asymptotic) {
      if (!report.asymptotic) report.asymptotic = IntervalStats{};
      accumulate(*report.asymptotic, rec.asy, rec.asy_len);
    }
  }
  finalize(report.ep, report.completed_sims);
  finalize(report.rt, report.completed_sims);
  finalize(report.sy, report.completed_sims);
  if (report.asymptotic) finalize(*report.asymptotic, report.completed_sims);
  report.ep_rt_gap = report.rt.avg_coverage - report.ep.avg_coverage;

  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::vector<GapRow> gap_table(const std::map<std::string, CoverageReport>& reports) {
  if (reports.empty()) {
    throw std::invalid_argument("gap_table: need at least one report");
  }
  std::vector<GapRow> rows;
  rows.reserve(reports.size());
  for (const auto& [label, report] : reports) {
    rows.push_back(GapRow{label, report.ep_rt_gap});
  }
  return rows;
}

std::string report_to_json(const CoverageReport& report, int indent) {
  nlohmann::ordered_json j;
  j["ep"] = stats_to_json(report.ep);
  j["rt"] = stats_to_json(report.rt);
  j["sy"] = stats_to_json(report.sy);
  if (report.asymptotic) j["asymptotic"] = stats_to_json(*report.asymptotic);
  j["ep_rt_gap"] = report.ep_rt_gap;
  j["completed_sims"] = report.completed_sims;
  j["failed_sims"] = report.failed_sims;
  return j.dump(indent);
}

std::string report_to_table(const CoverageReport& report) {
  char buf[160];
  std::string out;
  out += "          Average     Av. coverage      Average\n";
  out += "          coverage    below/above       length\n";
  auto row = [&](const char* name, const IntervalStats& s) {
    std::snprintf(buf, sizeof(buf), "  %-4s    %6.2f      %5.2f/%-5.2f       %.3f\n",
                  name, s.avg_coverage, s.below, s.above, s.avg_length);
    out += buf;
  };
  row("EP", report.ep);
  row("RT", report.rt);
  row("SY", report.sy);
  if (report.asymptotic) row("ASY", *report.asymptotic);
  std::snprintf(buf, sizeof(buf),
                "  gap(RT-EP) %.2fpp   sims %zu completed / %zu failed\n",
                report.ep_rt_gap, report.completed_sims, report.failed_sims);
  out += buf;
  return out;
}

}  // namespace varboot
