#include <benchmark/benchmark.h>

#include <memory>

#include "feigdim/dimension.hpp"
#include "feigdim/fixed_point.hpp"
#include "feigdim/presentation.hpp"

using namespace feigdim;

namespace {

SolverOptions solver() {
  SolverOptions o;
  o.degree = 40;
  return o;
}

const UnimodalSystem& quadratic() {
  static const UnimodalSystem sys(solve_fixed_point(Combinatorics::period_doubling(), 2, solver()));
  return sys;
}

std::shared_ptr<const Ifs> presentation_ifs(int K) {
  auto ps = std::make_shared<const PresentationSystem>(quadratic(), K);
  return std::make_shared<PresentationIfs>(ps, K);
}

}  // namespace

static void BM_SolveFixedPoint(benchmark::State& state) {
  SolverOptions o = solver();
  o.degree = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_fixed_point(Combinatorics::period_doubling(), 2, o));
}
BENCHMARK(BM_SolveFixedPoint)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

static void BM_BuildPresentation(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(PresentationSystem(quadratic(), K));
}
BENCHMARK(BM_BuildPresentation)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_OperatorAssembly(benchmark::State& state) {
  const PressureModel pm(presentation_ifs(40), static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(pm.operator_matrix(0.54));
}
BENCHMARK(BM_OperatorAssembly)->Arg(24)->Arg(48)->Unit(benchmark::kMicrosecond);

static void BM_LeadingEigenvalue(benchmark::State& state) {
  const PressureModel pm(presentation_ifs(40), 24, 1);
  for (auto _ : state) benchmark::DoNotOptimize(pm.leading_eigenvalue(0.54));
}
BENCHMARK(BM_LeadingEigenvalue)->Unit(benchmark::kMicrosecond);

static void BM_MoranOracle(benchmark::State& state) {
  auto ifs = presentation_ifs(40);
  for (auto _ : state) benchmark::DoNotOptimize(moran_oracle(*ifs, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_MoranOracle)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

static void BM_HausdorffDimension(benchmark::State& state) {
  DimensionOptions opts;
  opts.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(hausdorff_dimension(quadratic(), opts));
}
BENCHMARK(BM_HausdorffDimension)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
