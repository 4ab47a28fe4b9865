#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "topovox/mfcc.hpp"
#include "topovox/representations.hpp"

using namespace topovox;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.3);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

void BM_Spectrogram(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(spectrogram(x, 16000.0));
}
BENCHMARK(BM_Spectrogram)->Arg(8000)->Arg(16000);

void BM_ExtractZeros(benchmark::State& state) {
  const auto s = spectrogram(noise(16000, 2), 16000.0);
  for (auto _ : state) benchmark::DoNotOptimize(extract_zeros(s));
}
BENCHMARK(BM_ExtractZeros);

void BM_Mfcc(benchmark::State& state) {
  const auto s = spectrogram(noise(16000, 3), 16000.0);
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_mfcc(s, 16000.0));
}
BENCHMARK(BM_Mfcc);

void BM_SelectDelay(benchmark::State& state) {
  const auto x = noise(8000, 4);
  for (auto _ : state) benchmark::DoNotOptimize(select_delay(x));
}
BENCHMARK(BM_SelectDelay);

void BM_CaoNoise(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(cao_dimension(x, 1));
}
BENCHMARK(BM_CaoNoise)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

}  // namespace
