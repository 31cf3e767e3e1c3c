#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "roadmon/evaluate.hpp"
#include "roadmon/geo.hpp"
#include "roadmon/ingest.hpp"
#include "roadmon/tree_ensemble.hpp"

namespace roadmon {

/// One emitted telemetry record: the prediction for a closed window.
struct SegmentPrediction {
  std::size_t index = 0;
  double lat0 = 0.0, lon0 = 0.0, lat1 = 0.0, lon1 = 0.0;
  double length_mi = 0.0;
  double iri_in_mi = 0.0;
  RideClass ride_class = RideClass::Good;
  std::size_t n_samples = 0;
  double mean_speed = 0.0;              // m/s
  std::int64_t proc_latency_us = 0;     // feature extraction + prediction
  bool partial = false;

  bool operator==(const SegmentPrediction&) const = default;
};

/// NDJSON codec, keys: idx,lat0,lon0,lat1,lon1,len_mi,iri,class,n,speed,lat_us,partial
std::string to_ndjson(const SegmentPrediction& rec);
SegmentPrediction segment_prediction_from_json(std::string_view line);

/// Record sink over an ordered byte stream; write() appends exactly one
/// NDJSON line and flushes it. Throws SinkClosed when the target is gone.
class RecordSink {
 public:
  virtual ~RecordSink() = default;
  virtual void write(std::string_view line) = 0;
};

class OstreamSink : public RecordSink {
 public:
  explicit OstreamSink(std::ostream& out) : out_(out) {}
  void write(std::string_view line) override;

 private:
  std::ostream& out_;
};

/// At-most-once delivery across connection drops: when the inner sink throws,
/// a replacement is opened from the factory and emission resumes with the
/// next record; the failed record is counted dropped, never re-sent.
class ReconnectingSink : public RecordSink {
 public:
  using Factory = std::function<std::unique_ptr<RecordSink>()>;
  explicit ReconnectingSink(Factory factory);
  void write(std::string_view line) override;
  std::size_t records_dropped() const { return dropped_; }

 private:
  Factory factory_;
  std::unique_ptr<RecordSink> inner_;
  std::size_t dropped_ = 0;
};

struct PipelineConfig {
  GeoConfig geo;
  RideThresholds thresholds;
  bool include_partial = false;
};

struct PipelineStats {
  std::size_t segments = 0;          // records emitted (incl. partial when enabled)
  std::size_t samples = 0;
  std::int64_t p50_latency_us = 0;
  std::int64_t p95_latency_us = 0;
  std::size_t peak_window_samples = 0;     // segmenter high-water mark
  std::size_t largest_window_samples = 0;  // biggest closed window
  std::int64_t wall_us = 0;                // filled by run_pipeline
};

/// Push-driven single-pass pipeline: segment -> features -> predict ->
/// classify -> emit. Each sample is touched once; buffering is bounded by the
/// open window, so memory is independent of stream length. Records go to the
/// sink as one NDJSON line each, in segment order, the moment a window closes.
class EdgePipeline {
 public:
  EdgePipeline(const EnsembleModel& model, PipelineConfig cfg, RecordSink* sink = nullptr);

  /// Returns the record when this sample closes a window.
  std::optional<SegmentPrediction> push(const SensorSample& s);

  /// End of stream; emits the trailing partial window when configured.
  std::optional<SegmentPrediction> finish();

  PipelineStats stats() const;

 private:
  std::optional<SegmentPrediction> handle_window(SegmentWindow&& window);

  const EnsembleModel& model_;
  PipelineConfig cfg_;
  RecordSink* sink_;
  DistanceSegmenter segmenter_;
  std::vector<std::int64_t> latencies_us_;
  std::size_t samples_ = 0;
  std::size_t largest_window_ = 0;
  std::size_t emitted_ = 0;
};

/// Drives a sample source through the pipeline and fills wall-clock stats.
/// The source returns samples until nullopt (pull-driven back-pressure).
PipelineStats run_pipeline(const std::function<std::optional<SensorSample>()>& source,
                           const EnsembleModel& model, const PipelineConfig& cfg,
                           RecordSink& sink);

}  // namespace roadmon
