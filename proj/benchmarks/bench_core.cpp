#include <benchmark/benchmark.h>

#include <random>

#include "padsph/distributions.hpp"
#include "padsph/haar.hpp"
#include "padsph/levy.hpp"
#include "padsph/spherical.hpp"

using namespace padsph;

namespace {

FieldPtr field_for(const benchmark::State& state) {
  return FieldContext::create(state.range(0), static_cast<int>(state.range(1)), static_cast<int>(state.range(2)));
}

void BM_FieldMul(benchmark::State& state) {
  auto K = field_for(state);
  std::mt19937_64 rng(1);
  const ExtElement x = sample_sphere_uniform(K, 0, rng), y = sample_sphere_uniform(K, 1, rng);
  for (auto _ : state) benchmark::DoNotOptimize(x * y);
}
BENCHMARK(BM_FieldMul)->Args({3, 2, 8})->Args({5, 3, 8})->Args({3, 2, 32});

void BM_Decompose(benchmark::State& state) {
  auto K = field_for(state);
  std::mt19937_64 rng(2);
  const ExtElement x = sample_sphere_uniform(K, 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(decompose(x));
}
BENCHMARK(BM_Decompose)->Args({3, 2, 8})->Args({5, 2, 8})->Args({5, 3, 8})->Args({3, 2, 32});

void BM_SphericalIntegrate(benchmark::State& state) {
  auto K = field_for(state);
  const CylinderFunction f = random_cylinder_function(K, 3, 4, -1, 2, -1);
  for (auto _ : state) benchmark::DoNotOptimize(spherical_integrate(f));
}
BENCHMARK(BM_SphericalIntegrate)->Args({3, 2, 8})->Args({5, 2, 8})->Unit(benchmark::kMillisecond);

void BM_Pair(benchmark::State& state) {
  auto K = field_for(state);
  std::mt19937_64 rng(4);
  FiniteLevelAngular<Complex> F(UnitQuotient::get(K, 2), 0);
  for (std::size_t i = 0; i < F.size(); ++i) F[i] = Complex(static_cast<double>(rng() % 7), 1);
  const HomogeneousDistribution<Complex> h{Quasicharacter::complex(Complex(-0.5, 1.0), UnitCharacter{1, Int(1), 0}), F};
  const CylinderFunction phi = random_cylinder_function(K, 5, 4, -1, 2, -1);
  for (auto _ : state) benchmark::DoNotOptimize(pair(h, phi));
}
BENCHMARK(BM_Pair)->Args({3, 2, 8})->Unit(benchmark::kMillisecond);

void BM_SimulatePath(benchmark::State& state) {
  auto K = field_for(state);
  const LevyModel model;
  const ExtElement x0 = ExtElement::from_integer(K, 27);
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_path(model, K, x0, 1.0, path_seed(6, i++)));
}
BENCHMARK(BM_SimulatePath)->Args({3, 2, 8})->Args({5, 3, 8});

}  // namespace
BENCHMARK_MAIN();
