#include <benchmark/benchmark.h>

#include "gaflab/curvature.hpp"
#include "gaflab/optim.hpp"
#include "gaflab/problems.hpp"
#include "gaflab/rng.hpp"
#include "gaflab/surface.hpp"
#include "gaflab/transforms.hpp"

namespace {

using namespace gaflab;

Vector random_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Vector v(n);
  for (double& x : v) x = uniform(rng, -1.0, 1.0);
  return v;
}

const GradientTransform kArctan = GradientTransform::gaf(GafSpec(GafKind::arctan, 0.1, 20.0));

void BM_TransformParallel(benchmark::State& state) {
  const Vector g = random_vector(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(apply_transform(kArctan, g));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TransformParallel)->RangeMultiplier(10)->Range(1000, 1000000);

void BM_TransformSerial(benchmark::State& state) {
  const Vector g = random_vector(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(serial::apply_transform(kArctan, g));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TransformSerial)->RangeMultiplier(10)->Range(1000, 1000000);

// Cost of one optimizer step with and without the GAF, across dimensions.
void BM_StepIdentity(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  OptimizerSpec spec;
  Vector w = random_vector(n, 2);
  const Vector g = random_vector(n, 3);
  OptimizerState st = OptimizerState::zeros(n);
  for (auto _ : state) {
    step_inplace(spec, st, w, g);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_StepIdentity)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_StepArctan(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  OptimizerSpec spec;
  spec.transform = kArctan;
  Vector w = random_vector(n, 2);
  const Vector g = random_vector(n, 3);
  OptimizerState st = OptimizerState::zeros(n);
  for (auto _ : state) {
    step_inplace(spec, st, w, g);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_StepArctan)->Arg(1000)->Arg(10000)->Arg(100000);

FieldSamples quadratic_samples(std::size_t per_dim) {
  const Problem p = builtin_problem(BuiltinKind::paper_quadratic);
  RegionSpec r;
  r.box = {{-1.0, 1.0}, {-1.0, 1.0}};
  r.points_per_dim = per_dim;
  return sample_field(p.grad, r);
}

void BM_CurvatureParallel(benchmark::State& state) {
  const FieldSamples s = quadratic_samples(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_from_samples(s));
}
BENCHMARK(BM_CurvatureParallel)->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond);

void BM_CurvatureSerial(benchmark::State& state) {
  const FieldSamples s = quadratic_samples(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::estimate_from_samples(s));
}
BENCHMARK(BM_CurvatureSerial)->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond);

void BM_SurfaceRayParallel(benchmark::State& state) {
  const Problem p = builtin_problem(BuiltinKind::paper_quadratic);
  const Vector ax = axis_with_origin(-1.0, 1.0, static_cast<std::size_t>(state.range(0)));
  const auto t = GradientTransform::clip_norm(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(equivalent_surface(p, t, {ax, ax}));
}
BENCHMARK(BM_SurfaceRayParallel)->Arg(21)->Unit(benchmark::kMillisecond);

void BM_SurfaceRaySerial(benchmark::State& state) {
  const Problem p = builtin_problem(BuiltinKind::paper_quadratic);
  const Vector ax = axis_with_origin(-1.0, 1.0, static_cast<std::size_t>(state.range(0)));
  const auto t = GradientTransform::clip_norm(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(serial::equivalent_surface(p, t, {ax, ax}));
}
BENCHMARK(BM_SurfaceRaySerial)->Arg(21)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
