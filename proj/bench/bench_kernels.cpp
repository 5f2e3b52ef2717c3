// Serial reference kernels against their OpenMP counterparts.

#include <complex>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "timexplain/explain.hpp"
#include "timexplain/kernels.hpp"
#include "timexplain/models.hpp"

using namespace timexplain;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

std::vector<TimeSeries> random_series(std::size_t count, std::size_t d, std::uint64_t seed) {
  std::vector<TimeSeries> out;
  for (std::size_t i = 0; i < count; ++i) out.emplace_back(random_values(d, seed + i));
  return out;
}

template <bool Parallel>
void BM_Rdft(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto x = random_values(d, 1);
  std::vector<std::complex<double>> bins(d / 2 + 1);
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::rdft_direct(x, bins);
    } else {
      kernels::reference::rdft_direct(x, bins);
    }
    benchmark::DoNotOptimize(bins.data());
  }
}

template <bool Parallel>
void BM_Distances(benchmark::State& state) {
  const auto queries = random_series(static_cast<std::size_t>(state.range(0)), 256, 10);
  const auto refs = random_series(200, 256, 5000);
  for (auto _ : state) {
    auto out = Parallel ? kernels::euclidean_distances(queries, refs)
                        : kernels::reference::euclidean_distances(queries, refs);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_Explain(benchmark::State& state) {
  const std::size_t d = 128;
  std::vector<TimeSeries> series;
  std::vector<ClassId> labels;
  for (std::size_t i = 0; i < 40; ++i) {
    auto v = random_values(d, 100 + i);
    if (i % 2) {
      for (std::size_t t = 40; t < 60; ++t) v[t] += 2.0;
    }
    series.emplace_back(std::move(v));
    labels.push_back(i % 2 ? "1" : "0");
  }
  const LabeledDataset train(series, labels);
  const models::KnnModel knn(train, 5);
  explain::ExplainConfig cfg;
  cfg.runs = 4;
  cfg.budget = 500;
  cfg.threads = static_cast<int>(state.range(0));
  kernels::set_max_threads(cfg.threads);
  for (auto _ : state) {
    auto e = explain::explain_classifier(explain::model_function(knn), train[1], cfg, train);
    benchmark::DoNotOptimize(e);
  }
}

}  // namespace

BENCHMARK(BM_Rdft<false>)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(BM_Rdft<true>)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(BM_Distances<false>)->Arg(64)->Arg(1024);
BENCHMARK(BM_Distances<true>)->Arg(64)->Arg(1024);
BENCHMARK(BM_Explain)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
