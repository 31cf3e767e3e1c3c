#pragma once

namespace roadmon::units {

inline constexpr double kEarthRadiusKm = 6371.0;

/// Kilometers to miles. The whole segmentation unit chain (haversine km ->
/// mile threshold) uses this one constant so window lengths and thresholds
/// stay mutually consistent.
inline constexpr double kKmToMi = 0.621371;

/// One 0.1-mile segment expressed in meters through the same km->mi chain.
inline constexpr double kSegmentMeters = 0.1 / kKmToMi * 1000.0;

/// 1 m/km of rectified suspension travel = 63.36 in/mi.
inline constexpr double kInMiPerMKm = 63.36;

inline constexpr double kGravityMps2 = 9.81;

inline constexpr double kMetersPerMile = 1609.344;

constexpr double mph_to_mps(double mph) { return mph * kMetersPerMile / 3600.0; }
constexpr double mps_to_mph(double mps) { return mps * 3600.0 / kMetersPerMile; }
constexpr double kmh_to_mps(double kmh) { return kmh / 3.6; }

}  // namespace roadmon::units
