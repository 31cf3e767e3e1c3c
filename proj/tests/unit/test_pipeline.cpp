#include <doctest.h>

#include <memory>
#include <sstream>

#include "roadmon/errors.hpp"
#include "roadmon/harness.hpp"
#include "roadmon/pipeline.hpp"
#include "roadmon/road_synth.hpp"
#include "roadmon/spectral.hpp"

using namespace roadmon;

namespace {

struct CollectingSink : RecordSink {
  std::vector<std::string> lines;
  void write(std::string_view line) override { lines.emplace_back(line); }
};

// fails exactly once, at the requested record ordinal
struct FaultySink : RecordSink {
  std::vector<std::string>* lines;
  std::size_t fail_at;
  std::size_t seen = 0;
  bool failed = false;
  FaultySink(std::vector<std::string>* out, std::size_t fail_at_record)
      : lines(out), fail_at(fail_at_record) {}
  void write(std::string_view line) override {
    if (!failed && seen == fail_at) {
      failed = true;
      ++seen;
      throw SinkClosed("connection dropped");
    }
    ++seen;
    lines->emplace_back(line);
  }
};

struct TrainedFixture {
  EnsembleModel model;
  SynthStream stream;

  TrainedFixture() {
    const auto data = harness::build_campaign({{60.0, 65.0, 1.0}, {140.0, 50.0, 1.0}}, 5, 0.05);
    FitConfig cfg = boosted_defaults();
    cfg.n_trees = 40;
    cfg.seed = 5;
    model = fit_boosted(data.X, data.y, cfg);

    SynthConfig scfg;
    scfg.seed = 400;
    scfg.route_len_mi = 1.0;
    stream = synthesize_stream(generate_profile(scfg), scfg);
  }
};

const TrainedFixture& fixture() {
  static TrainedFixture f;
  return f;
}

}  // namespace

TEST_CASE("one synthetic mile emits exactly ten records, indices 0..9") {
  const auto& f = fixture();
  CollectingSink sink;
  EdgePipeline pipeline(f.model, PipelineConfig{}, &sink);
  std::vector<SegmentPrediction> records;
  for (const auto& s : f.stream.samples) {
    if (auto r = pipeline.push(s)) records.push_back(*r);
  }
  CHECK_FALSE(pipeline.finish().has_value());
  REQUIRE(records.size() == 10);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].index == i);
    CHECK(records[i].iri_in_mi >= 0.0);
    CHECK_FALSE(records[i].partial);
    CHECK(records[i].proc_latency_us >= 0);
  }
  CHECK(sink.lines.size() == 10);
}

TEST_CASE("stream output equals batch-stage composition bit-exactly") {
  const auto& f = fixture();
  EdgePipeline pipeline(f.model, PipelineConfig{}, nullptr);
  std::vector<SegmentPrediction> streamed;
  for (const auto& s : f.stream.samples) {
    if (auto r = pipeline.push(s)) streamed.push_back(*r);
  }

  // batch: segment everything first, then extract + predict per window
  DistanceSegmenter segmenter;
  std::vector<SegmentWindow> windows;
  for (const auto& s : f.stream.samples) {
    if (auto w = segmenter.push(s)) windows.push_back(std::move(*w));
  }
  REQUIRE(windows.size() == streamed.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto feats = extract_features(windows[i]);
    const double iri = predict(f.model, feature_vector(feats));
    CHECK(streamed[i].iri_in_mi == iri);  // bit-exact
    CHECK(streamed[i].length_mi == windows[i].length_mi);
    CHECK(streamed[i].n_samples == windows[i].az_series.size());
    CHECK(streamed[i].ride_class == classify(iri));
  }
}

TEST_CASE("NDJSON codec round-trips records losslessly") {
  const auto& f = fixture();
  EdgePipeline pipeline(f.model, PipelineConfig{}, nullptr);
  for (const auto& s : f.stream.samples) {
    if (auto r = pipeline.push(s)) {
      const std::string line = to_ndjson(*r);
      CHECK(line.find('\n') == std::string::npos);
      const SegmentPrediction back = segment_prediction_from_json(line);
      CHECK(back == *r);
    }
  }
  CHECK_THROWS_AS(segment_prediction_from_json("{not json"), Error);
  CHECK_THROWS_AS(segment_prediction_from_json("{\"idx\":0}"), Error);
}

TEST_CASE("emission order matches segment order") {
  const auto& f = fixture();
  CollectingSink sink;
  EdgePipeline pipeline(f.model, PipelineConfig{}, &sink);
  for (const auto& s : f.stream.samples) pipeline.push(s);
  for (std::size_t i = 0; i < sink.lines.size(); ++i) {
    CHECK(segment_prediction_from_json(sink.lines[i]).index == i);
  }
}

TEST_CASE("reconnect after drop resumes with the next record, no duplicates") {
  const auto& f = fixture();
  std::vector<std::string> delivered;
  std::size_t connections = 0;
  // the first connection drops while writing record 3; replacements are sound
  auto reconnecting = std::make_unique<ReconnectingSink>([&]() {
    ++connections;
    return std::make_unique<FaultySink>(&delivered,
                                        connections == 1 ? 3 : std::size_t(-1));
  });
  EdgePipeline pipeline(f.model, PipelineConfig{}, reconnecting.get());
  for (const auto& s : f.stream.samples) pipeline.push(s);
  pipeline.finish();

  CHECK(reconnecting->records_dropped() == 1);
  REQUIRE(delivered.size() == 9);
  std::vector<std::size_t> indices;
  for (const auto& line : delivered) {
    indices.push_back(segment_prediction_from_json(line).index);
  }
  // 3 is missing, everything else present exactly once, in order
  const std::vector<std::size_t> expected = {0, 1, 2, 4, 5, 6, 7, 8, 9};
  CHECK(indices == expected);
}

TEST_CASE("partial trailing window is emitted only when configured") {
  SynthConfig cfg;
  cfg.seed = 9;
  cfg.route_len_mi = 0.5;
  const auto half = synthesize_stream(generate_profile(cfg), cfg);
  // drop the tail so the last half window stays open
  const std::size_t cut = half.samples.size() * 9 / 10;

  for (const bool include : {false, true}) {
    PipelineConfig pcfg;
    pcfg.include_partial = include;
    EdgePipeline pipeline(fixture().model, pcfg, nullptr);
    std::size_t records = 0;
    for (std::size_t i = 0; i < cut; ++i) {
      if (pipeline.push(half.samples[i])) ++records;
    }
    const auto tail = pipeline.finish();
    CHECK(tail.has_value() == include);
    if (tail) {
      CHECK(tail->partial);
      CHECK(tail->length_mi < 0.1);
    }
  }
}

TEST_CASE("stats: counts, percentiles, and bounded buffering") {
  const auto& f = fixture();
  EdgePipeline pipeline(f.model, PipelineConfig{}, nullptr);
  for (const auto& s : f.stream.samples) pipeline.push(s);
  pipeline.finish();
  const auto st = pipeline.stats();
  CHECK(st.segments == 10);
  CHECK(st.samples == f.stream.samples.size());
  CHECK(st.p50_latency_us >= 0);
  CHECK(st.p95_latency_us >= st.p50_latency_us);
  CHECK(st.largest_window_samples > 0);
  CHECK(st.peak_window_samples <=
        static_cast<std::size_t>(1.2 * static_cast<double>(st.largest_window_samples)));
}

TEST_CASE("run_pipeline drives a pull source and accounts wall time") {
  const auto& f = fixture();
  std::size_t cursor = 0;
  CollectingSink sink;
  const auto stats = run_pipeline(
      [&]() -> std::optional<SensorSample> {
        if (cursor >= f.stream.samples.size()) return std::nullopt;
        return f.stream.samples[cursor++];
      },
      f.model, PipelineConfig{}, sink);
  CHECK(stats.segments == 10);
  CHECK(sink.lines.size() == 10);
  std::int64_t latency_sum = 0;
  for (const auto& line : sink.lines) {
    latency_sum += segment_prediction_from_json(line).proc_latency_us;
  }
  CHECK(latency_sum <= stats.wall_us);
}

TEST_CASE("an empty model cannot start a pipeline") {
  EnsembleModel empty;
  CHECK_THROWS_AS(EdgePipeline(empty, PipelineConfig{}, nullptr), ModelEmpty);
}
