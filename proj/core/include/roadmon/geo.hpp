#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "roadmon/ingest.hpp"
#include "roadmon/units.hpp"

namespace roadmon {

struct GeoConfig {
  double d_thr_mi = 0.1;                 // segment length threshold
  double earth_radius_km = units::kEarthRadiusKm;
  double gps_gap_timeout_ms = 5000.0;    // fix gap that force-closes a window
};

/// Great-circle distance in km between two lat/lon points (decimal degrees).
double haversine_km(double lat1, double lon1, double lat2, double lon2,
                    double radius_km = units::kEarthRadiusKm);

/// All samples accumulated for one fixed-distance window, plus its geometry.
struct SegmentWindow {
  std::size_t index = 0;            // ordinal from route start
  double start_lat = 0.0, start_lon = 0.0;
  double end_lat = 0.0, end_lon = 0.0;
  double length_mi = 0.0;
  std::vector<double> az_series;    // m/s^2, every sample in the window
  std::vector<double> speeds;       // m/s
  std::vector<double> alts;         // m
  double t_start_ms = 0.0, t_end_ms = 0.0;
  bool partial = false;
};

/// Accumulates samples into 0.1-mile windows. Distance advances only between
/// consecutive fresh fixes; held rows contribute signal but no distance. The
/// sample whose fix crosses d_thr closes the window (length may exceed d_thr
/// by up to one GPS hop) and its position seeds the next window, so windows
/// tile the path with no gaps and no shared samples.
///
/// Single-threaded per stream; run one segmenter per stream.
class DistanceSegmenter {
 public:
  explicit DistanceSegmenter(GeoConfig cfg = {});

  /// Feed the next sample in time order. Returns a window when one closes.
  std::optional<SegmentWindow> push(const SensorSample& s);

  /// End of stream: returns the open window flagged partial if it holds at
  /// least one sample.
  std::optional<SegmentWindow> finalize();

  /// High-water mark of samples buffered in the open window (memory bound).
  std::size_t peak_open_samples() const { return peak_open_; }

 private:
  void append_sample(const SensorSample& s);
  SegmentWindow close_window(bool partial);

  GeoConfig cfg_;
  // fp guard on the mile threshold so hops that tile a segment exactly close
  // on the crossing fix instead of one hop late
  static constexpr double kCrossEpsMi = 1e-9;

  SegmentWindow open_;
  bool window_has_samples_ = false;
  bool have_ref_ = false;           // a first fix has been seen
  double ref_lat_ = 0.0, ref_lon_ = 0.0, ref_t_ms_ = 0.0;
  std::size_t next_index_ = 0;
  std::size_t peak_open_ = 0;
};

}  // namespace roadmon
