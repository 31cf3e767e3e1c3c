#include "roadmon/geo.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace roadmon {

double haversine_km(double lat1, double lon1, double lat2, double lon2, double radius_km) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double p1 = lat1 * deg;
  const double p2 = lat2 * deg;
  const double dp = (lat2 - lat1) * deg;
  const double dl = (lon2 - lon1) * deg;
  const double sp = std::sin(dp / 2.0);
  const double sl = std::sin(dl / 2.0);
  const double a = sp * sp + std::cos(p1) * std::cos(p2) * sl * sl;
  return 2.0 * radius_km * std::asin(std::min(1.0, std::sqrt(a)));
}

DistanceSegmenter::DistanceSegmenter(GeoConfig cfg) : cfg_(cfg) {}

void DistanceSegmenter::append_sample(const SensorSample& s) {
  if (!window_has_samples_) {
    open_.t_start_ms = s.t_ms;
    window_has_samples_ = true;
  }
  open_.az_series.push_back(s.az);
  open_.speeds.push_back(s.speed);
  open_.alts.push_back(s.alt);
  open_.t_end_ms = s.t_ms;
  peak_open_ = std::max(peak_open_, open_.az_series.size());
}

SegmentWindow DistanceSegmenter::close_window(bool partial) {
  open_.index = next_index_++;
  open_.partial = partial;
  SegmentWindow out = std::move(open_);
  open_ = SegmentWindow{};
  // next window's position reference is the fix that closed this one
  open_.start_lat = out.end_lat;
  open_.start_lon = out.end_lon;
  open_.end_lat = out.end_lat;
  open_.end_lon = out.end_lon;
  window_has_samples_ = false;
  return out;
}

std::optional<SegmentWindow> DistanceSegmenter::push(const SensorSample& s) {
  if (!have_ref_) {
    if (!s.gps_fresh) return std::nullopt;  // pre-first-fix rows carry no position
    have_ref_ = true;
    ref_lat_ = s.lat;
    ref_lon_ = s.lon;
    ref_t_ms_ = s.t_ms;
    open_.start_lat = s.lat;
    open_.start_lon = s.lon;
    open_.end_lat = s.lat;
    open_.end_lon = s.lon;
    append_sample(s);
    return std::nullopt;
  }

  if (s.gps_fresh && s.t_ms - ref_t_ms_ > cfg_.gps_gap_timeout_ms) {
    // GPS outage: close what we have as partial, restart at the new fix
    std::optional<SegmentWindow> out;
    if (window_has_samples_) out = close_window(/*partial=*/true);
    open_ = SegmentWindow{};
    window_has_samples_ = false;
    open_.start_lat = s.lat;
    open_.start_lon = s.lon;
    open_.end_lat = s.lat;
    open_.end_lon = s.lon;
    ref_lat_ = s.lat;
    ref_lon_ = s.lon;
    ref_t_ms_ = s.t_ms;
    append_sample(s);
    return out;
  }

  append_sample(s);

  if (!s.gps_fresh) return std::nullopt;  // held fix: signal only, no distance

  const double hop_mi =
      haversine_km(ref_lat_, ref_lon_, s.lat, s.lon, cfg_.earth_radius_km) * units::kKmToMi;
  open_.length_mi += hop_mi;
  open_.end_lat = s.lat;
  open_.end_lon = s.lon;
  ref_lat_ = s.lat;
  ref_lon_ = s.lon;
  ref_t_ms_ = s.t_ms;

  if (open_.length_mi >= cfg_.d_thr_mi - kCrossEpsMi) {
    return close_window(/*partial=*/false);
  }
  return std::nullopt;
}

std::optional<SegmentWindow> DistanceSegmenter::finalize() {
  if (!window_has_samples_) return std::nullopt;
  return close_window(/*partial=*/true);
}

}  // namespace roadmon
