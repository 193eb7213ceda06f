#include <benchmark/benchmark.h>

#include "hypercolor/colorizer.hpp"
#include "hypercolor/harness.hpp"
#include "hypercolor/synthetic.hpp"

using namespace hypercolor;

namespace {

Acquisition make_acquisition(std::size_t side, std::size_t bands) {
  const auto truth = natural_scene(side, side, bands, 1);
  PointSpec spec;
  spec.noise.t = 1e-4;
  spec.workers = 1;
  return acquire(truth, spec);
}

void BM_ColorizeBands(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto acq = make_acquisition(side, 16);
  ColorizeOptions opts;
  for (auto _ : state) benchmark::DoNotOptimize(colorize(acq.guide, acq.clues, opts));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}
BENCHMARK(BM_ColorizeBands)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_ColorizeSubspace(benchmark::State& state) {
  const auto truth = natural_scene(128, 128, 31, 1);
  PointSpec spec;
  spec.workers = 1;
  const auto acq = acquire(truth, spec);
  const std::vector<HyperCube> cubes{truth};
  ColorizeOptions opts;
  opts.basis = learn_basis(cubes, 31, 1);
  opts.dims = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(colorize(acq.guide, acq.clues, opts));
}
BENCHMARK(BM_ColorizeSubspace)->Arg(3)->Arg(8)->Arg(31)->Unit(benchmark::kMillisecond);

void BM_SolverIterativeVsDense(benchmark::State& state) {
  const auto acq = make_acquisition(48, 4);
  ColorizeOptions opts;
  opts.edge_filter = false;
  opts.solve.kind = state.range(0) == 0 ? SolverKind::iterative : SolverKind::dense;
  for (auto _ : state) benchmark::DoNotOptimize(colorize(acq.guide, acq.clues, opts));
  state.SetLabel(state.range(0) == 0 ? "bicgstab" : "band-lu");
}
BENCHMARK(BM_SolverIterativeVsDense)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EdgeFilter(benchmark::State& state) {
  const auto acq = make_acquisition(128, 16);
  for (auto _ : state) benchmark::DoNotOptimize(edge_filter(acq.clues, acq.guide));
}
BENCHMARK(BM_EdgeFilter)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
