#include "roadmon/road_synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <istream>
#include <memory>
#include <numbers>
#include <ostream>
#include <string>

#include "roadmon/errors.hpp"
#include "roadmon/rng.hpp"
#include "roadmon/spectral.hpp"
#include "text_util.hpp"

namespace roadmon {

namespace {

// sub-seed stream ids
constexpr std::uint64_t kStreamProfile = 0x7072666cULL;
constexpr std::uint64_t kStreamWander = 0x77616e64ULL;
constexpr std::uint64_t kStreamNoise = 0x6e6f6973ULL;

double resolve_gd_n0(const SynthConfig& cfg) {
  return cfg.gd_n0 ? *cfg.gd_n0 : class_gd_n0(cfg.road_class);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// One spectral realization on an Nfft grid: Hermitian spectrum with
// band-limited amplitudes and uniform phases, inverse transformed.
std::vector<double> spectral_realization(std::size_t n_out, std::size_t nfft, double gd_n0,
                                         Rng rng) {
  std::vector<std::complex<double>> z(nfft, {0.0, 0.0});
  const double dn = 1.0 / (static_cast<double>(nfft) * kProfileDx);  // cycles/m per bin
  for (std::size_t j = 1; j < nfft / 2; ++j) {
    const double n_j = static_cast<double>(j) * dn;
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    if (n_j < kWavenumberMin || n_j > kWavenumberMax || gd_n0 <= 0.0) continue;
    const double gd = gd_n0 * std::pow(n_j / kWavenumberRef, -2.0);
    const double amp = std::sqrt(2.0 * gd * dn);
    const std::complex<double> c =
        0.5 * amp * static_cast<double>(nfft) * std::polar(1.0, phase);
    z[j] = c;
    z[nfft - j] = std::conj(c);
  }
  const std::vector<std::complex<double>> series = inverse_dft(z);
  std::vector<double> out(n_out);
  for (std::size_t i = 0; i < n_out; ++i) out[i] = series[i].real();
  return out;
}

struct StretchPlan {
  std::size_t n_segments = 0;
  std::size_t hops_per_segment = 0;
  double speed_mps = 0.0;
};

struct RoutePlan {
  std::vector<StretchPlan> stretches;
  std::size_t samples_per_fix = 1;
  double fs_hz = 365.0;
  std::size_t total_segments = 0;
};

RoutePlan plan_route(const SynthConfig& cfg) {
  if (cfg.fs_hz <= 0.0) throw NonpositiveRate(cfg.fs_hz);
  if (cfg.gps_rate_hz <= 0.0 || cfg.gps_rate_hz > cfg.fs_hz) {
    throw ConfigError("gps_rate_hz must be in (0, fs_hz]");
  }
  RoutePlan plan;
  plan.fs_hz = cfg.fs_hz;
  plan.samples_per_fix =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.fs_hz / cfg.gps_rate_hz)));
  const double gps_eff = cfg.fs_hz / static_cast<double>(plan.samples_per_fix);

  std::vector<SpeedStretch> stretches = cfg.speed_profile;
  if (stretches.empty()) stretches.push_back({cfg.route_len_mi, 29.0});

  for (const auto& s : stretches) {
    if (s.speed_mps <= 0.0) throw ConfigError("stretch speed must be positive");
    StretchPlan p;
    p.n_segments = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(s.miles / 0.1)));
    const double hops = units::kSegmentMeters * gps_eff / s.speed_mps;
    p.hops_per_segment = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(hops)));
    p.speed_mps = units::kSegmentMeters * gps_eff / static_cast<double>(p.hops_per_segment);
    plan.total_segments += p.n_segments;
    plan.stretches.push_back(p);
  }
  return plan;
}

// planned traversal distance; stretch miles snap to whole segments
double route_meters(const SynthConfig& cfg) {
  return static_cast<double>(plan_route(cfg).total_segments) * units::kSegmentMeters;
}

}  // namespace

double class_gd_n0(RoadClass road_class) {
  switch (road_class) {
    case RoadClass::A: return 16e-6;
    case RoadClass::B: return 64e-6;
    case RoadClass::C: return 256e-6;
    case RoadClass::D: return 1024e-6;
    case RoadClass::E: return 4096e-6;
  }
  throw ConfigError("unknown road class");
}

RoadProfile generate_profile(const SynthConfig& cfg) {
  const double gd = resolve_gd_n0(cfg);
  const double need_m = route_meters(cfg) + 5.0;
  const auto n = static_cast<std::size_t>(std::ceil(need_m / kProfileDx)) + 1;
  const std::size_t nfft = next_pow2(n);

  const Rng base(cfg.seed);
  RoadProfile profile;
  profile.dx_m = kProfileDx;
  profile.elev_m = spectral_realization(n, nfft, gd, base.spawn(kStreamProfile));

  if (cfg.wander > 0.0) {
    const double w = std::min(cfg.wander, 0.999);
    const double keep = std::sqrt(1.0 - w * w);
    const std::vector<double> perturb = spectral_realization(
        n, nfft, gd, base.spawn(kStreamWander).spawn(cfg.run_id));
    for (std::size_t i = 0; i < n; ++i) {
      profile.elev_m[i] = keep * profile.elev_m[i] + w * perturb[i];
    }
  }
  return profile;
}

std::vector<SegmentLabel> profile_labels(const RoadProfile& profile, double route_len_mi,
                                         const GoldenCarParams& params) {
  const auto n_segs = static_cast<std::size_t>(std::llround(route_len_mi / 0.1));
  std::vector<SegmentLabel> labels;
  labels.reserve(n_segs);
  for (std::size_t j = 0; j < n_segs; ++j) {
    const auto a = static_cast<std::size_t>(std::floor(static_cast<double>(j) *
                                                       units::kSegmentMeters / profile.dx_m));
    const auto b = static_cast<std::size_t>(std::floor(static_cast<double>(j + 1) *
                                                       units::kSegmentMeters / profile.dx_m));
    if (b + 1 > profile.elev_m.size()) {
      throw ProfileTooShort("profile does not cover the requested route length");
    }
    RoadProfile slice;
    slice.dx_m = profile.dx_m;
    slice.elev_m.assign(profile.elev_m.begin() + static_cast<std::ptrdiff_t>(a),
                        profile.elev_m.begin() + static_cast<std::ptrdiff_t>(b) + 1);
    const IriResult iri = compute_iri(slice, params);
    labels.push_back({j, iri.m_per_km, iri.in_per_mi});
  }
  return labels;
}

void synthesize_stream(const RoadProfile& profile, const SynthConfig& cfg,
                       const GoldenCarParams& params,
                       const std::function<void(const SensorSample&)>& sink,
                       std::vector<SegmentLabel>* labels) {
  const RoutePlan plan = plan_route(cfg);
  const double route_m =
      static_cast<double>(plan.total_segments) * units::kSegmentMeters;
  if (profile.length_m() + 1e-9 < route_m) {
    throw ProfileTooShort("profile shorter than the planned route");
  }

  const RoadProfile smoothed = smooth_profile(profile);
  const double dx = smoothed.dx_m;
  const double meridian_deg_per_m = 180.0 / (std::numbers::pi * units::kEarthRadiusKm * 1000.0);

  Rng noise_rng = Rng(cfg.seed).spawn(kStreamNoise).spawn(cfg.run_id);

  // grid cursor shared across stretches; accel interpolated between grid points
  std::size_t grid_k = 0;  // index of accel_hi
  double accel_lo = 0.0, accel_hi = 0.0;
  std::unique_ptr<QcIntegrator> integ;

  double held_lat = cfg.start_lat, held_lon = cfg.start_lon;
  double held_speed = 0.0, held_alt = cfg.base_alt_m;
  std::size_t global_i = 0;
  double x_base = 0.0;  // route meters at stretch start

  auto emit = [&](double x_m, bool fix, double stretch_speed) {
    // advance the integrator until x_m is bracketed by [grid_k-1, grid_k]
    while (static_cast<double>(grid_k) * dx < x_m && grid_k + 1 < smoothed.elev_m.size()) {
      ++grid_k;
      accel_lo = accel_hi;
      integ->step(smoothed.elev_m[grid_k]);
      accel_hi = integ->sprung_accel();
    }
    const double x_lo = static_cast<double>(grid_k - 1) * dx;
    double frac = (x_m - x_lo) / dx;
    frac = std::clamp(frac, 0.0, 1.0);
    const double accel = accel_lo + (accel_hi - accel_lo) * frac;

    SensorSample s;
    s.t_ms = static_cast<double>(std::llround(static_cast<double>(global_i) * 1000.0 / plan.fs_hz));
    s.az = accel + units::kGravityMps2 +
           (cfg.noise_sigma > 0.0 ? noise_rng.normal(0.0, cfg.noise_sigma) : 0.0);
    if (fix) {
      held_lat = cfg.start_lat + x_m * meridian_deg_per_m;
      held_lon = cfg.start_lon;
      held_speed = stretch_speed;
      held_alt = cfg.base_alt_m;
    }
    s.lat = held_lat;
    s.lon = held_lon;
    s.speed = held_speed;
    s.alt = held_alt;
    s.gps_fresh = fix;
    sink(s);
    ++global_i;
  };

  bool first = true;
  for (const auto& stretch : plan.stretches) {
    // rebuild the integrator at this stretch's speed, carrying physical state
    const double v = stretch.speed_mps;
    auto next = std::make_unique<QcIntegrator>(params, dx, v);
    if (first) {
      const auto i05 = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(kIriInitSlopeBaseMeters / dx)));
      const std::size_t last = std::min(i05, smoothed.elev_m.size() - 1);
      const double slope =
          (smoothed.elev_m[last] - smoothed.elev_m[0]) / (static_cast<double>(last) * dx);
      next->reset(smoothed.elev_m[0], slope * v);
      grid_k = 1;
      accel_lo = next->sprung_accel();
      next->step(smoothed.elev_m[1]);
      accel_hi = next->sprung_accel();
    } else {
      next->set_state(integ->state(), smoothed.elev_m[grid_k]);
    }
    integ = std::move(next);

    if (first) {
      emit(0.0, /*fix=*/true, v);
      first = false;
    }
    const std::size_t stretch_samples =
        stretch.n_segments * stretch.hops_per_segment * plan.samples_per_fix;
    const double local_step = v / plan.fs_hz;
    for (std::size_t li = 1; li <= stretch_samples; ++li) {
      const double x = x_base + static_cast<double>(li) * local_step;
      emit(x, (global_i % plan.samples_per_fix) == 0, v);
    }
    x_base += static_cast<double>(stretch.n_segments) * units::kSegmentMeters;
  }

  if (labels) {
    *labels = profile_labels(profile, static_cast<double>(plan.total_segments) * 0.1, params);
  }
}

SynthStream synthesize_stream(const RoadProfile& profile, const SynthConfig& cfg,
                              const GoldenCarParams& params) {
  SynthStream out;
  synthesize_stream(profile, cfg, params,
                    [&out](const SensorSample& s) { out.samples.push_back(s); }, &out.labels);
  return out;
}

void write_labels_csv(std::ostream& out, std::span<const SegmentLabel> labels) {
  out << "segment_index,iri_mkm,iri_inmi\n";
  for (const auto& l : labels) {
    out << l.index << ',' << detail::format_double(l.iri_m_per_km) << ','
        << detail::format_double(l.iri_in_per_mi) << '\n';
  }
}

std::vector<SegmentLabel> read_labels_csv(std::istream& in) {
  std::vector<SegmentLabel> labels;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = detail::strip_cr(line);
    if (!header) {
      if (sv != "segment_index,iri_mkm,iri_inmi") {
        throw MalformedLine(line_no, "bad labels header");
      }
      header = true;
      continue;
    }
    if (sv.empty()) continue;
    detail::split_fields(sv, ',', fields);
    if (fields.size() != 3) throw MalformedLine(line_no, "expected 3 fields");
    auto idx = detail::parse_u64(fields[0]);
    auto mkm = detail::parse_double(fields[1]);
    auto inmi = detail::parse_double(fields[2]);
    if (!idx || !mkm || !inmi) throw MalformedLine(line_no, "unparsable label row");
    labels.push_back({static_cast<std::size_t>(*idx), *mkm, *inmi});
  }
  if (!header) throw MalformedLine(0, "empty labels file");
  return labels;
}

}  // namespace roadmon
