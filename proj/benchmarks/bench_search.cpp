#include <benchmark/benchmark.h>

#include "mns/mns_search.hpp"
#include "mns/noise_models.hpp"

namespace {

using namespace mns;

void BM_BfgsMaximize(benchmark::State& state) {
  const LindbladModel m = collective_xz(3, 1.0, 1.0);
  const KrausChannel ch = lindblad_to_kraus(m, default_time_step(m));
  const EncodingObjective obj(ch, Dims::make(2, 2, 8));
  SearchConfig config;
  config.gradient = state.range(0) == 0 ? GradientMethod::Analytic : GradientMethod::CentralDifference;
  Rng rng(1);
  const UnitaryParams start = random_initial_params(8, rng);
  for (auto _ : state) benchmark::DoNotOptimize(bfgs_maximize(obj, start, config));
  state.SetLabel(state.range(0) == 0 ? "analytic" : "central-difference");
}
BENCHMARK(BM_BfgsMaximize)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SearchDims(benchmark::State& state) {
  const LindbladModel m = collective_xz(3, 1.0, 1.0);
  const KrausChannel ch = lindblad_to_kraus(m, default_time_step(m));
  SearchConfig config;
  config.threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(search_dims(ch, Dims::make(2, 2, 8), config));
}
BENCHMARK(BM_SearchDims)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

}  // namespace
