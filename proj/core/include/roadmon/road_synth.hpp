#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "roadmon/ingest.hpp"
#include "roadmon/quarter_car.hpp"
#include "roadmon/units.hpp"

namespace roadmon {

/// Roughness grade tiers; gd_n0 magnitudes follow the ISO 8608 geometric
/// class centers at n0 = 0.1 cycles/m.
enum class RoadClass { A, B, C, D, E };

/// Displacement PSD at the reference wavenumber for a class tier, m^3.
double class_gd_n0(RoadClass road_class);

struct SpeedStretch {
  double miles = 1.0;
  double speed_mps = 29.0;
};

struct SynthConfig {
  RoadClass road_class = RoadClass::B;
  std::optional<double> gd_n0;          // m^3 at n0 = 0.1 cycles/m; overrides road_class
  std::uint64_t seed = 0;
  double route_len_mi = 1.0;            // used when speed_profile is empty
  std::vector<SpeedStretch> speed_profile;  // piecewise-constant speeds
  double noise_sigma = 0.05;            // accelerometer noise std, m/s^2
  double fs_hz = 365.0;
  double gps_rate_hz = 5.0;
  double base_alt_m = 231.0;
  double start_lat = 38.9;
  double start_lon = -92.2;
  double wander = 0.0;        // [0,1): run-to-run path variation, see generate_profile
  std::uint64_t run_id = 0;   // identity of a repeated run (wander + noise streams)
};

inline constexpr double kProfileDx = 0.05;       // m
inline constexpr double kWavenumberMin = 0.01;   // cycles/m
inline constexpr double kWavenumberMax = 10.0;   // cycles/m
inline constexpr double kWavenumberRef = 0.1;    // cycles/m (n0)

/// Spectral road synthesis: a sum of cosines with displacement PSD
/// Gd(n) = gd_n0 (n/n0)^-2 over [0.01, 10] cycles/m, uniform random phases
/// drawn from the seed, dx = 0.05 m. With wander > 0 the result is
/// sqrt(1-w^2) * base + w * (independent same-class component keyed by
/// run_id), preserving roughness variance while varying the ridden line.
RoadProfile generate_profile(const SynthConfig& cfg);

struct SegmentLabel {
  std::size_t index = 0;
  double iri_m_per_km = 0.0;
  double iri_in_per_mi = 0.0;
};

/// Reference IRI per full 0.1-mile slice of the profile, computed at the
/// golden simulation speed regardless of travel speed.
std::vector<SegmentLabel> profile_labels(const RoadProfile& profile, double route_len_mi,
                                         const GoldenCarParams& params = {});

/// Streams sensor rows for a traversal of the profile: a_z is the sprung-mass
/// response at travel speed plus gravity and Gaussian noise, resampled to
/// fs_hz; GPS fixes are laid along a meridian at gps_rate_hz with
/// sample-and-hold rows in between. Requested speeds are snapped (< 2%) so an
/// integer number of GPS hops tiles each 0.1-mile segment and windows stay
/// aligned with label ordinals over arbitrarily long routes.
void synthesize_stream(const RoadProfile& profile, const SynthConfig& cfg,
                       const GoldenCarParams& params,
                       const std::function<void(const SensorSample&)>& sink,
                       std::vector<SegmentLabel>* labels = nullptr);

struct SynthStream {
  std::vector<SensorSample> samples;
  std::vector<SegmentLabel> labels;
};

SynthStream synthesize_stream(const RoadProfile& profile, const SynthConfig& cfg,
                              const GoldenCarParams& params = {});

/// Labels CSV: segment_index,iri_mkm,iri_inmi
void write_labels_csv(std::ostream& out, std::span<const SegmentLabel> labels);
std::vector<SegmentLabel> read_labels_csv(std::istream& in);

}  // namespace roadmon
