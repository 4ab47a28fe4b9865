#include <benchmark/benchmark.h>

#include <random>

#include "topovox/forest.hpp"

using namespace topovox;

namespace {

Dataset synthetic(std::size_t rows, std::size_t features) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  Dataset d;
  d.n_rows = rows;
  d.classes = {"a", "b", "c"};
  for (std::size_t j = 0; j < features; ++j) d.feature_names.push_back("f" + std::to_string(j));
  d.x.resize(rows * features);
  for (std::size_t i = 0; i < rows; ++i) {
    const int y = static_cast<int>(i % 3);
    d.y.push_back(y);
    for (std::size_t j = 0; j < features; ++j) d.x[j * rows + i] = g(rng) + (j < 3 ? 0.8 * y : 0.0);
  }
  return d;
}

void BM_TrainForest(benchmark::State& state) {
  const auto d = synthetic(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  ForestParams p;
  p.n_trees = 100;
  p.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train_forest(d, p));
}
BENCHMARK(BM_TrainForest)->Args({600, 60})->Args({2000, 200})->Unit(benchmark::kMillisecond);

}  // namespace
