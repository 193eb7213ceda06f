#include <benchmark/benchmark.h>

#include "hypercolor/metrics.hpp"
#include "hypercolor/random.hpp"
#include "hypercolor/sampling.hpp"
#include "hypercolor/synthetic.hpp"

using namespace hypercolor;

namespace {

void BM_GuidedWhisk(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto guide = make_guide(natural_scene(side, side, 8, 2));
  SamplingPlan plan;
  plan.pattern = SamplingPattern::guided_whisk;
  for (auto _ : state) benchmark::DoNotOptimize(make_mask(plan, side, side, &guide));
}
BENCHMARK(BM_GuidedWhisk)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_PoissonSample(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0));
  std::uint64_t i = 0;
  for (auto _ : state) {
    CounterRng rng(1, 2, i++);
    benchmark::DoNotOptimize(sample_poisson(lambda, rng));
  }
}
BENCHMARK(BM_PoissonSample)->Arg(3)->Arg(300)->Arg(300000);

void BM_Metrics(benchmark::State& state) {
  const auto truth = natural_scene(128, 128, 31, 3);
  const auto recon = natural_scene(128, 128, 31, 4);
  for (auto _ : state) benchmark::DoNotOptimize(report(recon, truth));
}
BENCHMARK(BM_Metrics)->Unit(benchmark::kMillisecond);

}  // namespace
