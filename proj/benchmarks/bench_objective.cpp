#include <benchmark/benchmark.h>

#include "mns/encoding_objective.hpp"
#include "mns/noise_models.hpp"

namespace {

using namespace mns;

KrausChannel collective_channel(std::size_t n_qubits) {
  const LindbladModel m = collective_xz(n_qubits, 1.0, 1.0);
  return lindblad_to_kraus(m, default_time_step(m));
}

void BM_Realize(benchmark::State& state) {
  Rng rng(1);
  const UnitaryParams p = random_initial_params(static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(realize(p));
}
BENCHMARK(BM_Realize)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_Objective(benchmark::State& state) {
  const auto nq = static_cast<std::size_t>(state.range(0));
  const KrausChannel ch = collective_channel(nq);
  const Dims dims = Dims::make(2, 2, ch.dim);
  const EncodingObjective obj(ch, dims);
  Rng rng(2);
  const UnitaryParams p = random_initial_params(ch.dim, rng);
  for (auto _ : state) benchmark::DoNotOptimize(obj.value(p));
}
BENCHMARK(BM_Objective)->Arg(3)->Arg(4)->Arg(5);

void BM_AnalyticGradient(benchmark::State& state) {
  const KrausChannel ch = collective_channel(static_cast<std::size_t>(state.range(0)));
  const EncodingObjective obj(ch, Dims::make(2, 2, ch.dim));
  Rng rng(3);
  const UnitaryParams p = random_initial_params(ch.dim, rng);
  RealVector g;
  for (auto _ : state) benchmark::DoNotOptimize(obj.value_and_gradient(p, g));
}
BENCHMARK(BM_AnalyticGradient)->Arg(3)->Arg(4)->Arg(5);

void BM_CentralDifferenceGradient(benchmark::State& state) {
  const KrausChannel ch = collective_channel(static_cast<std::size_t>(state.range(0)));
  const EncodingObjective obj(ch, Dims::make(2, 2, ch.dim));
  Rng rng(4);
  const UnitaryParams p = random_initial_params(ch.dim, rng);
  for (auto _ : state) benchmark::DoNotOptimize(obj.finite_difference_gradient(p, kDefaultFiniteDifferenceStep, true));
}
BENCHMARK(BM_CentralDifferenceGradient)->Arg(3)->Arg(4);

void BM_ReducedChannel(benchmark::State& state) {
  const KrausChannel ch = collective_channel(3);
  Rng rng(5);
  const EncodingCandidate c(Dims::make(2, 2, 8), random_initial_params(8, rng));
  for (auto _ : state) benchmark::DoNotOptimize(reduced_channel(ch, c));
}
BENCHMARK(BM_ReducedChannel);

}  // namespace
