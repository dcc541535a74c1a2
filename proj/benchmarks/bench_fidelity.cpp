#include <benchmark/benchmark.h>

#include "mns/fidelity_eval.hpp"
#include "mns/noise_models.hpp"

namespace {

using namespace mns;

void BM_Evolve(benchmark::State& state) {
  const auto nq = static_cast<std::size_t>(state.range(0));
  const LindbladModel m = collective_xz(nq, 1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(evolve(m, 1.0));
}
BENCHMARK(BM_Evolve)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_WorstCaseFidelity(benchmark::State& state) {
  const auto n1 = static_cast<std::size_t>(state.range(0));
  const LindbladModel m =
      perturbed_collective(3, 1.0, 1.0, random_perturbation_unitary(8, 0.1, PerturbationMode::Global, 7));
  const EvolvedChannel e = evolve(m, 1.0);
  Rng rng(1);
  const ComplexMatrix u = realize(random_initial_params(8, rng));
  const Dims dims = Dims::make(n1, n1 == 2 ? 2 : 1, 8);
  for (auto _ : state) benchmark::DoNotOptimize(worst_case_fidelity(u, dims, e));
}
BENCHMARK(BM_WorstCaseFidelity)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace
