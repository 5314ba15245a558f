#include <benchmark/benchmark.h>

#include "varboot/estimation.hpp"
#include "varboot/model.hpp"
#include "varboot/montecarlo.hpp"

namespace {

using namespace varboot;

ReturnSeries make_series(std::size_t n) {
  return simulate_path(preset_spec("garch-high"), StandardNormal{}, n, 1000, 7).returns;
}

void BM_FilterGarch(benchmark::State& state) {
  ReturnSeries series = make_series(static_cast<std::size_t>(state.range(0)));
  ModelSpec spec = preset_spec("garch-high");
  std::vector<double> out(series.size() + 1);
  double init = filter_init_sigma(spec, series);
  for (auto _ : state) {
    filter_sigma_into(spec, series.values, init, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FilterGarch)->RangeMultiplier(4)->Range(500, 32000)->Complexity();

void BM_FilterTGarch(benchmark::State& state) {
  ReturnSeries series = make_series(static_cast<std::size_t>(state.range(0)));
  ModelSpec spec = preset_spec("tgarch-high");
  std::vector<double> out(series.size() + 1);
  double init = filter_init_sigma(spec, series);
  for (auto _ : state) {
    filter_sigma_into(spec, series.values, init, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_FilterTGarch)->Arg(5000);

void BM_QmlObjective(benchmark::State& state) {
  ReturnSeries series = make_series(static_cast<std::size_t>(state.range(0)));
  ModelSpec spec = preset_spec("garch-high");
  for (auto _ : state) {
    benchmark::DoNotOptimize(qml_objective(spec, series));
  }
}
BENCHMARK(BM_QmlObjective)->Arg(500)->Arg(5000);

void BM_FitTwoStep(benchmark::State& state) {
  ReturnSeries series = make_series(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    FitResult fit = fit_two_step(series, ModelFamily::Garch11, 0.05);
    benchmark::DoNotOptimize(fit.xi_hat);
  }
}
BENCHMARK(BM_FitTwoStep)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
