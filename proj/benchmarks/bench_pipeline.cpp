#include <benchmark/benchmark.h>

#include "roadmon/harness.hpp"
#include "roadmon/pipeline.hpp"
#include "roadmon/road_synth.hpp"

namespace {

using namespace roadmon;

struct NullSink : RecordSink {
  void write(std::string_view) override {}
};

// samples/second through segment -> features -> predict -> emit
void BM_pipeline_throughput(benchmark::State& state) {
  const auto data = harness::build_campaign({{60.0, 65.0, 1.0}, {150.0, 45.0, 1.0}}, 3, 0.05);
  auto cfg = boosted_defaults();
  cfg.n_trees = 100;
  const EnsembleModel model = fit_boosted(data.X, data.y, cfg);

  SynthConfig scfg;
  scfg.seed = 12;
  scfg.route_len_mi = 2.0;
  const auto stream = synthesize_stream(generate_profile(scfg), scfg);

  NullSink sink;
  for (auto _ : state) {
    EdgePipeline pipeline(model, PipelineConfig{}, &sink);
    for (const auto& s : stream.samples) pipeline.push(s);
    pipeline.finish();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(stream.samples.size()));
}

void BM_segment_feature_extraction(benchmark::State& state) {
  SynthConfig scfg;
  scfg.seed = 12;
  scfg.route_len_mi = 1.0;
  const auto stream = synthesize_stream(generate_profile(scfg), scfg);
  for (auto _ : state) {
    DistanceSegmenter seg;
    std::size_t n = 0;
    for (const auto& s : stream.samples) {
      if (auto w = seg.push(s); w && !w->partial) {
        benchmark::DoNotOptimize(extract_features(*w));
        ++n;
      }
    }
    benchmark::DoNotOptimize(n);
  }
}

void BM_quarter_car_mile(benchmark::State& state) {
  SynthConfig cfg;
  cfg.seed = 9;
  cfg.route_len_mi = 1.0;
  const RoadProfile profile = generate_profile(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_iri(profile));
  }
}

}  // namespace

BENCHMARK(BM_pipeline_throughput)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_segment_feature_extraction)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_quarter_car_mile)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
