#include <benchmark/benchmark.h>

#include <vector>

#include "roadmon/rng.hpp"
#include "roadmon/tree_ensemble.hpp"

namespace {

using roadmon::FeatureRow;

struct Data {
  std::vector<FeatureRow> X;
  std::vector<double> y;
};

Data make_data(std::size_t n) {
  roadmon::Rng rng(23);
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    FeatureRow x;
    for (auto& v : x) v = rng.uniform(0, 10);
    d.X.push_back(x);
    d.y.push_back(10 * x[0] + x[4] * x[4] + rng.normal(0, 2));
  }
  return d;
}

void BM_fit_bagged_exact(benchmark::State& state) {
  const Data d = make_data(static_cast<std::size_t>(state.range(0)));
  auto cfg = roadmon::bagged_defaults();
  cfg.n_trees = 50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(roadmon::fit_bagged(d.X, d.y, cfg));
  }
}

void BM_fit_bagged_histogram(benchmark::State& state) {
  const Data d = make_data(static_cast<std::size_t>(state.range(0)));
  auto cfg = roadmon::bagged_defaults();
  cfg.n_trees = 50;
  cfg.histogram_bins = 64;
  for (auto _ : state) {
    benchmark::DoNotOptimize(roadmon::fit_bagged(d.X, d.y, cfg));
  }
}

void BM_fit_boosted(benchmark::State& state) {
  const Data d = make_data(static_cast<std::size_t>(state.range(0)));
  auto cfg = roadmon::boosted_defaults();
  cfg.n_trees = 50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(roadmon::fit_boosted(d.X, d.y, cfg));
  }
}

void BM_predict(benchmark::State& state) {
  const Data d = make_data(400);
  auto cfg = roadmon::boosted_defaults();
  const auto model = roadmon::fit_boosted(d.X, d.y, cfg);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(roadmon::predict(model, d.X[i]));
    i = (i + 1) % d.X.size();
  }
}

}  // namespace

BENCHMARK(BM_fit_bagged_exact)->Arg(400)->Arg(2000);
BENCHMARK(BM_fit_bagged_histogram)->Arg(400)->Arg(2000);
BENCHMARK(BM_fit_boosted)->Arg(400)->Arg(2000);
BENCHMARK(BM_predict);

BENCHMARK_MAIN();
