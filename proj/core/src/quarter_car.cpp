#include "roadmon/quarter_car.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "roadmon/errors.hpp"
#include "text_util.hpp"

namespace roadmon {

namespace {

// 6x6 dense helpers for the augmented quarter-car system. Row-major.
using Mat6 = std::array<double, 36>;

Mat6 identity6() {
  Mat6 m{};
  for (int i = 0; i < 6; ++i) m[i * 6 + i] = 1.0;
  return m;
}

Mat6 multiply(const Mat6& a, const Mat6& b) {
  Mat6 out{};
  for (int i = 0; i < 6; ++i) {
    for (int k = 0; k < 6; ++k) {
      const double aik = a[i * 6 + k];
      if (aik == 0.0) continue;
      for (int j = 0; j < 6; ++j) out[i * 6 + j] += aik * b[k * 6 + j];
    }
  }
  return out;
}

double inf_norm(const Mat6& m) {
  double best = 0.0;
  for (int i = 0; i < 6; ++i) {
    double row = 0.0;
    for (int j = 0; j < 6; ++j) row += std::abs(m[i * 6 + j]);
    best = std::max(best, row);
  }
  return best;
}

// Scaling-and-squaring Taylor expansion; converges to machine precision for
// the scaled norm <= 2^-5 used here.
Mat6 expm(Mat6 m) {
  const double norm = inf_norm(m);
  int squarings = 0;
  if (norm > 0.03125) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.03125)));
    const double scale = std::ldexp(1.0, -squarings);
    for (auto& v : m) v *= scale;
  }
  Mat6 result = identity6();
  Mat6 term = identity6();
  for (int k = 1; k <= 24; ++k) {
    term = multiply(term, m);
    const double inv = 1.0 / static_cast<double>(k);
    double largest = 0.0;
    for (int i = 0; i < 36; ++i) {
      term[i] *= inv;
      result[i] += term[i];
      largest = std::max(largest, std::abs(term[i]));
    }
    if (largest < 1e-300) break;
  }
  for (int s = 0; s < squarings; ++s) result = multiply(result, result);
  return result;
}

// Continuous dynamics of [zs zs' zu zu' y s] where y is the road input under
// the tire and s = dy/dt is held constant over one interval.
Mat6 system_matrix(const GoldenCarParams& p) {
  Mat6 a{};
  auto at = [&a](int r, int c) -> double& { return a[r * 6 + c]; };
  at(0, 1) = 1.0;
  at(1, 0) = -p.k2;
  at(1, 1) = -p.c;
  at(1, 2) = p.k2;
  at(1, 3) = p.c;
  at(2, 3) = 1.0;
  at(3, 0) = p.k2 / p.mu;
  at(3, 1) = p.c / p.mu;
  at(3, 2) = -(p.k1 + p.k2) / p.mu;
  at(3, 3) = -p.c / p.mu;
  at(3, 4) = p.k1 / p.mu;
  at(4, 5) = 1.0;
  return a;
}

}  // namespace

QcIntegrator::QcIntegrator(const GoldenCarParams& params, double dx_m, double v_mps)
    : params_(params), dt_(dx_m / v_mps) {
  Mat6 scaled = system_matrix(params);
  for (auto& v : scaled) v *= dt_;
  phi_ = expm(scaled);
}

void QcIntegrator::reset(double y0, double init_rate_mps) {
  state_.zs = y0;
  state_.zu = y0;
  state_.zs_dot = init_rate_mps;
  state_.zu_dot = init_rate_mps;
  y_ = y0;
}

void QcIntegrator::set_state(const QcState& st, double y_current) {
  state_ = st;
  y_ = y_current;
}

const QcState& QcIntegrator::step(double y_next) {
  const double s = (y_next - y_) / dt_;
  const double w[6] = {state_.zs, state_.zs_dot, state_.zu, state_.zu_dot, y_, s};
  double out[6];
  for (int i = 0; i < 6; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 6; ++j) acc += phi_[i * 6 + j] * w[j];
    out[i] = acc;
  }
  state_.zs = out[0];
  state_.zs_dot = out[1];
  state_.zu = out[2];
  state_.zu_dot = out[3];
  y_ = y_next;
  return state_;
}

double QcIntegrator::sprung_accel() const {
  return -params_.k2 * (state_.zs - state_.zu) - params_.c * (state_.zs_dot - state_.zu_dot);
}

RoadProfile smooth_profile(const RoadProfile& profile, double baselen_m) {
  const auto n = static_cast<std::ptrdiff_t>(profile.elev_m.size());
  RoadProfile out;
  out.dx_m = profile.dx_m;
  out.elev_m.resize(profile.elev_m.size());
  const auto nbins = std::max<std::ptrdiff_t>(1, std::llround(baselen_m / profile.dx_m));
  const std::ptrdiff_t half_lo = (nbins - 1) / 2;
  const std::ptrdiff_t half_hi = nbins / 2;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half_lo);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half_hi);
    double sum = 0.0;
    for (std::ptrdiff_t k = lo; k <= hi; ++k) sum += profile.elev_m[static_cast<std::size_t>(k)];
    out.elev_m[static_cast<std::size_t>(i)] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

namespace {

double initial_slope(const RoadProfile& smoothed) {
  const auto i05 = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(kIriInitSlopeBaseMeters / smoothed.dx_m)));
  const std::size_t last = std::min(i05, smoothed.elev_m.size() - 1);
  return (smoothed.elev_m[last] - smoothed.elev_m[0]) /
         (static_cast<double>(last) * smoothed.dx_m);
}

void check_length(const RoadProfile& profile) {
  if (profile.elev_m.size() < 2 || profile.dx_m <= 0.0 ||
      profile.length_m() < kIriSettleInMeters) {
    throw ProfileTooShort("profile must cover at least " +
                          std::to_string(kIriSettleInMeters) + " m");
  }
}

}  // namespace

QcTrace simulate_quarter_car(const RoadProfile& profile, const GoldenCarParams& params) {
  check_length(profile);
  const RoadProfile smoothed = smooth_profile(profile);

  QcIntegrator integ(params, smoothed.dx_m, params.v_sim_mps);
  const double slope = initial_slope(smoothed);
  integ.reset(smoothed.elev_m[0], slope * params.v_sim_mps);

  QcTrace trace;
  trace.dt_s = integ.dt_s();
  trace.states.reserve(smoothed.elev_m.size());
  trace.sprung_accel.reserve(smoothed.elev_m.size());
  trace.states.push_back(integ.state());
  trace.sprung_accel.push_back(integ.sprung_accel());
  for (std::size_t k = 1; k < smoothed.elev_m.size(); ++k) {
    integ.step(smoothed.elev_m[k]);
    trace.states.push_back(integ.state());
    trace.sprung_accel.push_back(integ.sprung_accel());
  }
  return trace;
}

IriResult compute_iri(const RoadProfile& profile, const GoldenCarParams& params) {
  check_length(profile);
  const RoadProfile smoothed = smooth_profile(profile);

  QcIntegrator integ(params, smoothed.dx_m, params.v_sim_mps);
  const double slope = initial_slope(smoothed);
  integ.reset(smoothed.elev_m[0], slope * params.v_sim_mps);

  const auto settle = static_cast<std::size_t>(std::ceil(kIriSettleInMeters / smoothed.dx_m));
  double rectified = 0.0;  // sum |zs' - zu'| dt
  std::size_t accumulated = 0;
  for (std::size_t k = 1; k < smoothed.elev_m.size(); ++k) {
    const QcState& st = integ.step(smoothed.elev_m[k]);
    if (k > settle) {
      rectified += std::abs(st.zs_dot - st.zu_dot) * integ.dt_s();
      ++accumulated;
    }
  }
  if (accumulated == 0) throw ProfileTooShort("no samples beyond the settle-in span");

  const double distance_km = static_cast<double>(accumulated) * smoothed.dx_m / 1000.0;
  IriResult r;
  r.m_per_km = rectified / distance_km;
  r.in_per_mi = r.m_per_km * units::kInMiPerMKm;
  return r;
}

void write_profile_csv(std::ostream& out, const RoadProfile& profile) {
  out << "x_m,elev_m\n";
  for (std::size_t i = 0; i < profile.elev_m.size(); ++i) {
    out << detail::format_double(static_cast<double>(i) * profile.dx_m) << ','
        << detail::format_double(profile.elev_m[i]) << '\n';
  }
}

RoadProfile read_profile_csv(std::istream& in) {
  RoadProfile profile;
  profile.elev_m.clear();
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::vector<std::string_view> fields;
  std::vector<double> xs;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = detail::strip_cr(line);
    if (!header) {
      if (sv != "x_m,elev_m") throw MalformedLine(line_no, "expected header 'x_m,elev_m'");
      header = true;
      continue;
    }
    if (sv.empty()) continue;
    detail::split_fields(sv, ',', fields);
    if (fields.size() != 2) throw MalformedLine(line_no, "expected 2 fields");
    auto x = detail::parse_double(fields[0]);
    auto e = detail::parse_double(fields[1]);
    if (!x || !e) throw MalformedLine(line_no, "unparsable number");
    xs.push_back(*x);
    profile.elev_m.push_back(*e);
  }
  if (!header || xs.size() < 2) throw MalformedLine(line_no, "profile needs at least 2 points");
  profile.dx_m = xs[1] - xs[0];
  if (profile.dx_m <= 0.0) throw MalformedLine(2, "x must be increasing");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double expected = xs[0] + static_cast<double>(i) * profile.dx_m;
    if (std::abs(xs[i] - expected) > 1e-6) {
      throw MalformedLine(i + 2, "non-uniform profile spacing");
    }
  }
  return profile;
}

}  // namespace roadmon
