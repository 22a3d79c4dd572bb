// Hot-path timings: mesh generation, operator assembly, Fortin application,
// and the inf-sup eigensolve. Not part of the test suite.

#include "thfortin/analysis.hpp"
#include "thfortin/assembly.hpp"
#include "thfortin/fortin.hpp"
#include "thfortin/mesh.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <utility>

using namespace thfortin;

namespace {

std::shared_ptr<const Mesh> cached_mesh(int dim, int n) {
  static std::map<std::pair<int, int>, std::shared_ptr<const Mesh>> cache;
  auto& slot = cache[{dim, n}];
  if (!slot) slot = std::make_shared<const Mesh>(freudenthal_cube(dim, n));
  return slot;
}

void bench_mesh_build(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(freudenthal_cube(dim, n));
  }
}
BENCHMARK(bench_mesh_build)->Args({2, 8})->Args({3, 4})->Args({3, 8})->Unit(benchmark::kMillisecond);

void bench_stiffness_assembly(benchmark::State& state) {
  auto mesh = cached_mesh(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  auto space = make_space(mesh, SpaceKind::P2VectorZeroTrace);
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_operator(OperatorTag::stiffness, space, space));
  }
}
BENCHMARK(bench_stiffness_assembly)->Args({2, 8})->Args({3, 4})->Unit(benchmark::kMillisecond);

void bench_fortin_construct(benchmark::State& state) {
  auto mesh = cached_mesh(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    FortinOperator fortin(mesh, FortinOperator::Variant::taylor_hood);
    benchmark::DoNotOptimize(fortin);
  }
}
BENCHMARK(bench_fortin_construct)->Args({2, 8})->Args({3, 4})->Unit(benchmark::kMillisecond);

void bench_fortin_apply(benchmark::State& state) {
  auto mesh = cached_mesh(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const FortinOperator fortin(mesh, FortinOperator::Variant::taylor_hood);
  const auto field = make_sin_curl_field(mesh->dim);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fortin.apply(*field, 6));
  }
}
BENCHMARK(bench_fortin_apply)->Args({2, 8})->Args({3, 4})->Unit(benchmark::kMillisecond);

void bench_infsup(benchmark::State& state) {
  auto mesh = cached_mesh(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        infsup_constant(mesh, SpaceKind::P2VectorZeroTrace, SpaceKind::P1Pressure));
  }
}
BENCHMARK(bench_infsup)->Args({2, 4})->Args({3, 3})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
