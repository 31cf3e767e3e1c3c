#include "roadmon/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "roadmon/errors.hpp"
#include "roadmon/spectral.hpp"

namespace roadmon {

namespace {
using ordered_json = nlohmann::ordered_json;

std::int64_t percentile(std::vector<std::int64_t> values, double q) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  const std::size_t idx = rank == 0 ? 0 : rank - 1;
  return values[std::min(idx, values.size() - 1)];
}
}  // namespace

std::string to_ndjson(const SegmentPrediction& rec) {
  ordered_json j;
  j["idx"] = rec.index;
  j["lat0"] = rec.lat0;
  j["lon0"] = rec.lon0;
  j["lat1"] = rec.lat1;
  j["lon1"] = rec.lon1;
  j["len_mi"] = rec.length_mi;
  j["iri"] = rec.iri_in_mi;
  j["class"] = to_string(rec.ride_class);
  j["n"] = rec.n_samples;
  j["speed"] = rec.mean_speed;
  j["lat_us"] = rec.proc_latency_us;
  j["partial"] = rec.partial;
  return j.dump();
}

SegmentPrediction segment_prediction_from_json(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad telemetry record: ") + e.what());
  }
  SegmentPrediction rec;
  try {
    rec.index = j.at("idx").get<std::size_t>();
    rec.lat0 = j.at("lat0").get<double>();
    rec.lon0 = j.at("lon0").get<double>();
    rec.lat1 = j.at("lat1").get<double>();
    rec.lon1 = j.at("lon1").get<double>();
    rec.length_mi = j.at("len_mi").get<double>();
    rec.iri_in_mi = j.at("iri").get<double>();
    const auto cls = ride_class_from_string(j.at("class").get<std::string>());
    if (!cls) throw Error("bad ride class in telemetry record");
    rec.ride_class = *cls;
    rec.n_samples = j.at("n").get<std::size_t>();
    rec.mean_speed = j.at("speed").get<double>();
    rec.proc_latency_us = j.at("lat_us").get<std::int64_t>();
    rec.partial = j.at("partial").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad telemetry record: ") + e.what());
  }
  return rec;
}

void OstreamSink::write(std::string_view line) {
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw SinkClosed("output stream went bad");
}

ReconnectingSink::ReconnectingSink(Factory factory) : factory_(std::move(factory)) {
  inner_ = factory_();
}

void ReconnectingSink::write(std::string_view line) {
  try {
    inner_->write(line);
  } catch (const SinkClosed&) {
    ++dropped_;
    inner_ = factory_();
  }
}

EdgePipeline::EdgePipeline(const EnsembleModel& model, PipelineConfig cfg, RecordSink* sink)
    : model_(model), cfg_(cfg), sink_(sink), segmenter_(cfg.geo) {
  if (model_.trees.empty()) throw ModelEmpty();
}

std::optional<SegmentPrediction> EdgePipeline::handle_window(SegmentWindow&& window) {
  if (window.partial && !cfg_.include_partial) return std::nullopt;
  if (window.az_series.size() < 2) return std::nullopt;  // unpredictable sliver

  const auto t0 = std::chrono::steady_clock::now();
  SegmentFeatures features;
  double iri = 0.0;
  try {
    features = extract_features(window);
    iri = predict(model_, feature_vector(features));
  } catch (const Error& e) {
    throw Error("segment " + std::to_string(window.index) + ": " + e.what());
  }
  const auto t1 = std::chrono::steady_clock::now();

  SegmentPrediction rec;
  rec.index = window.index;
  rec.lat0 = window.start_lat;
  rec.lon0 = window.start_lon;
  rec.lat1 = window.end_lat;
  rec.lon1 = window.end_lon;
  rec.length_mi = window.length_mi;
  rec.iri_in_mi = iri;
  rec.ride_class = classify(iri, cfg_.thresholds);
  rec.n_samples = window.az_series.size();
  rec.mean_speed = features.mean_speed;
  rec.proc_latency_us =
      std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();
  rec.partial = window.partial;

  largest_window_ = std::max(largest_window_, rec.n_samples);
  latencies_us_.push_back(rec.proc_latency_us);
  ++emitted_;
  if (sink_) sink_->write(to_ndjson(rec));
  return rec;
}

std::optional<SegmentPrediction> EdgePipeline::push(const SensorSample& s) {
  ++samples_;
  auto window = segmenter_.push(s);
  if (!window) return std::nullopt;
  return handle_window(std::move(*window));
}

std::optional<SegmentPrediction> EdgePipeline::finish() {
  auto window = segmenter_.finalize();
  if (!window) return std::nullopt;
  return handle_window(std::move(*window));
}

PipelineStats EdgePipeline::stats() const {
  PipelineStats st;
  st.segments = emitted_;
  st.samples = samples_;
  st.p50_latency_us = percentile(latencies_us_, 0.50);
  st.p95_latency_us = percentile(latencies_us_, 0.95);
  st.peak_window_samples = segmenter_.peak_open_samples();
  st.largest_window_samples = largest_window_;
  return st;
}

PipelineStats run_pipeline(const std::function<std::optional<SensorSample>()>& source,
                           const EnsembleModel& model, const PipelineConfig& cfg,
                           RecordSink& sink) {
  const auto t0 = std::chrono::steady_clock::now();
  EdgePipeline pipeline(model, cfg, &sink);
  while (auto sample = source()) pipeline.push(*sample);
  pipeline.finish();
  const auto t1 = std::chrono::steady_clock::now();
  PipelineStats st = pipeline.stats();
  st.wall_us = std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();
  return st;
}

}  // namespace roadmon
