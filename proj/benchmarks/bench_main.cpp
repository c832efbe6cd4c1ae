#include <benchmark/benchmark.h>

#include <vector>

#include "crsm/integrals.hpp"
#include "crsm/setfun.hpp"
#include "crsm/simulate.hpp"
#include "crsm/transforms.hpp"

namespace {

using namespace crsm;

Capacity exchangeable(std::size_t d) {
  const std::vector<MixingAtom> zeta{{0.2, 0.5}, {0.7, 0.5}};
  return exchangeable_capacity(Carrier::numbered(d), zeta, 1.0);
}

void BM_MobiusInverse(benchmark::State& state) {
  const auto theta = exchangeable(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mobius_inverse(theta));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(theta.table().size()));
}
BENCHMARK(BM_MobiusInverse)->DenseRange(4, 20, 4);

void BM_Classify(benchmark::State& state) {
  const auto theta = exchangeable(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(classify(theta));
}
BENCHMARK(BM_Classify)->DenseRange(4, 16, 4);

void BM_ChoquetIntegral(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto theta = exchangeable(d);
  std::vector<double> v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = double((i * 7) % d) + 0.5;
  const PointFunction f(v);
  for (auto _ : state) benchmark::DoNotOptimize(choquet_integral(f, theta));
}
BENCHMARK(BM_ChoquetIntegral)->DenseRange(4, 20, 4);

void BM_SimulateCrsm(benchmark::State& state) {
  const auto theta = exchangeable(static_cast<std::size_t>(state.range(0)));
  SimConfig cfg;
  cfg.seed = 1;
  cfg.samples = 10000;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_crsm(theta, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.samples));
}
BENCHMARK(BM_SimulateCrsm)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
