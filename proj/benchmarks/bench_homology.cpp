#include <benchmark/benchmark.h>

#include <random>

#include "topovox/delaunay.hpp"
#include "topovox/homology.hpp"

using namespace topovox;

namespace {

PointCloud random_cloud(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointCloud c;
  c.dim = dim;
  for (std::size_t i = 0; i < n * dim; ++i) c.coords.push_back(u(rng));
  return c;
}

void BM_Delaunay2D(benchmark::State& state) {
  const auto c = random_cloud(static_cast<std::size_t>(state.range(0)), 2, 1);
  for (auto _ : state) benchmark::DoNotOptimize(delaunay(c));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Delaunay2D)->RangeMultiplier(4)->Range(256, 4096)->Complexity();

void BM_Delaunay3D(benchmark::State& state) {
  const auto c = random_cloud(static_cast<std::size_t>(state.range(0)), 3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(delaunay(c));
}
BENCHMARK(BM_Delaunay3D)->RangeMultiplier(4)->Range(256, 2048);

void BM_AlphaPersistence3D(benchmark::State& state) {
  const auto c = random_cloud(static_cast<std::size_t>(state.range(0)), 3, 3);
  for (auto _ : state) benchmark::DoNotOptimize(compute_persistence(alpha_filtration(c)));
}
BENCHMARK(BM_AlphaPersistence3D)->Arg(500)->Arg(2000);

void BM_CubicalPersistence(benchmark::State& state) {
  // a 0.5 s spectrogram is about 410 frames x 129 bins
  const std::size_t rows = static_cast<std::size_t>(state.range(0)), cols = 129;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> g(rows * cols);
  for (auto& v : g) v = u(rng);
  const auto k = cubical_filtration(g, rows, cols);
  for (auto _ : state) benchmark::DoNotOptimize(compute_persistence(k));
}
BENCHMARK(BM_CubicalPersistence)->Arg(100)->Arg(410);

void BM_Bottleneck(benchmark::State& state) {
  const auto a = compute_persistence(alpha_filtration(random_cloud(static_cast<std::size_t>(state.range(0)), 2, 5)));
  const auto b = compute_persistence(alpha_filtration(random_cloud(static_cast<std::size_t>(state.range(0)), 2, 6)));
  for (auto _ : state) benchmark::DoNotOptimize(bottleneck_distance(a, b, 0));
}
BENCHMARK(BM_Bottleneck)->Arg(100)->Arg(400);

}  // namespace
