#include <benchmark/benchmark.h>

#include "varboot/bootstrap.hpp"
#include "varboot/montecarlo.hpp"

namespace {

using namespace varboot;

struct Pipeline {
  ReturnSeries series;
  FitResult fit;
};

const Pipeline& pipeline(std::size_t n) {
  static Pipeline small = [] {
    Pipeline p;
    p.series = simulate_path(preset_spec("garch-high"), NormalizedStudentT{6}, 500,
                             1000, 11)
                   .returns;
    p.fit = fit_two_step(p.series, ModelFamily::Garch11, 0.05);
    return p;
  }();
  static Pipeline large = [] {
    Pipeline p;
    p.series = simulate_path(preset_spec("garch-high"), NormalizedStudentT{6}, 5000,
                             1000, 12)
                   .returns;
    p.fit = fit_two_step(p.series, ModelFamily::Garch11, 0.05);
    return p;
  }();
  return n == 500 ? small : large;
}

void BM_FixedReplicateFull(benchmark::State& state) {
  const Pipeline& p = pipeline(static_cast<std::size_t>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Replicate rep =
        fixed_design_replicate(p.fit, p.series, 0.05, seed++, EstimatorMode::FullQmle);
    benchmark::DoNotOptimize(rep.var_star);
  }
}
BENCHMARK(BM_FixedReplicateFull)->Arg(500)->Arg(5000)->Unit(benchmark::kMicrosecond);

void BM_FixedReplicateNR(benchmark::State& state) {
  const Pipeline& p = pipeline(static_cast<std::size_t>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Replicate rep = fixed_design_replicate(p.fit, p.series, 0.05, seed++,
                                           EstimatorMode::NewtonRaphson);
    benchmark::DoNotOptimize(rep.var_star);
  }
}
BENCHMARK(BM_FixedReplicateNR)->Arg(500)->Arg(5000)->Unit(benchmark::kMicrosecond);

void BM_RecursiveReplicateFull(benchmark::State& state) {
  const Pipeline& p = pipeline(static_cast<std::size_t>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Replicate rep = recursive_design_replicate(p.fit, p.series, 0.05, seed++,
                                               EstimatorMode::FullQmle);
    benchmark::DoNotOptimize(rep.var_star);
  }
}
BENCHMARK(BM_RecursiveReplicateFull)->Arg(500)->Unit(benchmark::kMicrosecond);

void BM_BuildIntervals(benchmark::State& state) {
  const Pipeline& p = pipeline(500);
  BootstrapConfig cfg;
  cfg.b_replicates = 499;
  BootstrapOutcome outcome = run_bootstrap(p.fit, p.series, 0.05, cfg);
  for (auto _ : state) {
    IntervalSet set = build_intervals(outcome, 0.10);
    benchmark::DoNotOptimize(set.rt.lo);
  }
}
BENCHMARK(BM_BuildIntervals);

}  // namespace
