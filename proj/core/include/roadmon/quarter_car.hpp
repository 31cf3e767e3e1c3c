#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "roadmon/units.hpp"

namespace roadmon {

/// Uniformly spaced longitudinal elevation series.
struct RoadProfile {
  double dx_m = 0.05;          // spatial step
  std::vector<double> elev_m;  // elevation at each grid point

  double length_m() const {
    return elev_m.size() < 2 ? 0.0 : static_cast<double>(elev_m.size() - 1) * dx_m;
  }
};

/// Golden Car parameter set, normalized per unit sprung mass:
///   k1 = 653 s^-2 (tire), k2 = 63.3 s^-2 (suspension), c = 6.0 s^-1,
///   mu = 0.15 (unsprung/sprung mass ratio), simulated at 80 km/h.
struct GoldenCarParams {
  double k1 = 653.0;
  double k2 = 63.3;
  double c = 6.0;
  double mu = 0.15;
  double v_sim_mps = units::kmh_to_mps(80.0);
};

struct QcState {
  double zs = 0.0;      // sprung displacement, m
  double zs_dot = 0.0;  // sprung velocity, m/s
  double zu = 0.0;      // unsprung displacement, m
  double zu_dot = 0.0;  // unsprung velocity, m/s
};

/// Moving average over a 250 mm base length (default). Same sample count;
/// edge bins average over the available span.
RoadProfile smooth_profile(const RoadProfile& profile, double baselen_m = 0.25);

/// Steps the quarter-car one profile interval at a time using the exact
/// state-transition discretization for a constant-slope input. dt = dx / v
/// is fixed per instance; rebuild the integrator when speed changes.
class QcIntegrator {
 public:
  QcIntegrator(const GoldenCarParams& params, double dx_m, double v_mps);

  /// Place the car on the road: both masses at y0, both moving vertically at
  /// init_rate_mps (v * initial slope for a rolling start).
  void reset(double y0, double init_rate_mps);

  /// Restore a full state, e.g. when carrying physics across a speed change.
  /// y_current is the road elevation under the tire at the current position.
  void set_state(const QcState& st, double y_current);

  /// Advance one interval whose input elevation ramps to y_next.
  const QcState& step(double y_next);

  const QcState& state() const { return state_; }
  double dt_s() const { return dt_; }

  /// Sprung-mass acceleration at the current state, m/s^2.
  double sprung_accel() const;

 private:
  GoldenCarParams params_;
  double dt_;
  double y_ = 0.0;
  QcState state_;
  // state transition of the augmented system [zs zs' zu zu' y s]
  std::array<double, 36> phi_{};
};

struct QcTrace {
  std::vector<QcState> states;        // one per profile point
  std::vector<double> sprung_accel;   // m/s^2, one per profile point
  double dt_s = 0.0;
};

inline constexpr double kIriSettleInMeters = 11.0;
inline constexpr double kIriInitSlopeBaseMeters = 0.5;

/// Full simulation over the smoothed profile traversed at params.v_sim_mps.
/// The state is initialized from the mean slope of the first 0.5 m.
/// Throws ProfileTooShort when the profile is under 11 m.
QcTrace simulate_quarter_car(const RoadProfile& profile, const GoldenCarParams& params = {});

struct IriResult {
  double m_per_km = 0.0;
  double in_per_mi = 0.0;
};

/// IRI = mean |zs_dot - zu_dot| per unit distance, accumulated after the
/// 11 m settle-in. Streams the integration; no trace is materialized.
IriResult compute_iri(const RoadProfile& profile, const GoldenCarParams& params = {});

/// Profile file format: CSV "x_m,elev_m"; uniform spacing enforced to 1e-6 m.
void write_profile_csv(std::ostream& out, const RoadProfile& profile);
RoadProfile read_profile_csv(std::istream& in);

}  // namespace roadmon
