#include <benchmark/benchmark.h>

#include <vector>

#include "roadmon/rng.hpp"
#include "roadmon/spectral.hpp"

namespace {

std::vector<double> random_signal(std::size_t n) {
  roadmon::Rng rng(17);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.uniform(-1, 1);
  return x;
}

void BM_dft(benchmark::State& state) {
  const auto x = random_signal(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(roadmon::dft(std::span<const double>(x)));
  }
  state.SetComplexityN(state.range(0));
}

void BM_power_spectrum(benchmark::State& state) {
  const auto x = random_signal(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(roadmon::power_spectrum(x, 365.0));
  }
}

}  // namespace

// power of two, typical window length (2044 = 2^2 * 7 * 73), prime
BENCHMARK(BM_dft)->Arg(2048)->Arg(2044)->Arg(2039)->Arg(4096)->Arg(1 << 16);
BENCHMARK(BM_power_spectrum)->Arg(2044)->Arg(4096);

BENCHMARK_MAIN();
