#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "roadmon/errors.hpp"
#include "roadmon/quarter_car.hpp"
#include "roadmon/road_synth.hpp"
#include "roadmon/rng.hpp"
#include "support/oracles.hpp"

using namespace roadmon;

namespace {

RoadProfile flat_profile(double length_m, double dx = 0.05) {
  RoadProfile p;
  p.dx_m = dx;
  p.elev_m.assign(static_cast<std::size_t>(length_m / dx) + 1, 0.0);
  return p;
}

RoadProfile scaled(const RoadProfile& p, double alpha) {
  RoadProfile out = p;
  for (auto& v : out.elev_m) v *= alpha;
  return out;
}

RoadProfile class_profile(double gd_n0, std::uint64_t seed, double miles = 0.15) {
  SynthConfig cfg;
  cfg.gd_n0 = gd_n0;
  cfg.seed = seed;
  cfg.route_len_mi = miles;
  return generate_profile(cfg);
}

}  // namespace

TEST_CASE("flat profile: every state identically zero, IRI exactly zero") {
  const auto p = flat_profile(100.0);
  const auto trace = simulate_quarter_car(p);
  for (const auto& st : trace.states) {
    CHECK(st.zs == 0.0);
    CHECK(st.zs_dot == 0.0);
    CHECK(st.zu == 0.0);
    CHECK(st.zu_dot == 0.0);
  }
  const auto iri = compute_iri(p);
  CHECK(iri.m_per_km == 0.0);
  CHECK(iri.in_per_mi == 0.0);
}

TEST_CASE("profiles under the settle-in length are rejected") {
  CHECK_THROWS_AS(compute_iri(flat_profile(8.0)), ProfileTooShort);
  CHECK_THROWS_AS(simulate_quarter_car(flat_profile(8.0)), ProfileTooShort);
}

TEST_CASE("IRI homogeneity: IRI(alpha p) == alpha IRI(p)") {
  const auto p = class_profile(64e-6, 31);
  const double base = compute_iri(p).m_per_km;
  REQUIRE(base > 0.0);
  for (const double alpha : {0.25, 2.0, 17.5}) {
    const double got = compute_iri(scaled(p, alpha)).m_per_km;
    CHECK(got == doctest::Approx(alpha * base).epsilon(1e-9));
  }
  CHECK(compute_iri(scaled(p, 0.0)).m_per_km == 0.0);
}

TEST_CASE("state trajectories scale linearly with the profile") {
  const auto p = class_profile(64e-6, 32);
  const auto t1 = simulate_quarter_car(p);
  const auto t2 = simulate_quarter_car(scaled(p, 4.0));
  REQUIRE(t1.states.size() == t2.states.size());
  for (std::size_t k = 0; k < t1.states.size(); k += 97) {
    CHECK(t2.states[k].zs == doctest::Approx(4.0 * t1.states[k].zs).epsilon(1e-9));
    CHECK(t2.states[k].zu_dot == doctest::Approx(4.0 * t1.states[k].zu_dot).epsilon(1e-9));
  }
}

TEST_CASE("step profile: response stays bounded and converges back to rest") {
  RoadProfile p = flat_profile(200.0);
  for (std::size_t i = p.elev_m.size() / 2; i < p.elev_m.size(); ++i) p.elev_m[i] = 0.02;
  const auto trace = simulate_quarter_car(p);
  double max_zs = 0.0;
  for (const auto& st : trace.states) max_zs = std::max(max_zs, std::abs(st.zs));
  CHECK(max_zs < 0.06);  // bounded overshoot
  const auto& last = trace.states.back();
  CHECK(last.zs == doctest::Approx(0.02).epsilon(1e-3));
  CHECK(std::abs(last.zs_dot) < 1e-4);
  CHECK(std::abs(last.zu_dot) < 1e-4);
}

TEST_CASE("exact discretization agrees with same-step RK4 within 0.5%") {
  Rng rng(8);
  const double tiers[4] = {16e-6, 64e-6, 256e-6, 1024e-6};
  for (int i = 0; i < 5; ++i) {
    const auto p = class_profile(tiers[i % 4], 100 + static_cast<std::uint64_t>(i));
    const double exact = compute_iri(p).m_per_km;
    const double rk4 = oracles::rk4_iri_m_per_km(p, GoldenCarParams{}, 1);
    CHECK(std::abs(exact - rk4) / rk4 < 0.005);
  }
}

TEST_CASE("step response tracks a dense RK4 reference") {
  RoadProfile p = flat_profile(60.0);
  for (std::size_t i = p.elev_m.size() / 2; i < p.elev_m.size(); ++i) p.elev_m[i] = 0.02;
  const double exact = compute_iri(p).m_per_km;
  const double dense = oracles::rk4_iri_m_per_km(p, GoldenCarParams{}, 20);
  CHECK(exact == doctest::Approx(dense).epsilon(0.01));
}

TEST_CASE("downsampling a band-limited profile moves IRI by under 2%") {
  // long-wave content only: wavelengths >= 5 m, far above the 0.1 m grid
  RoadProfile p;
  p.dx_m = 0.05;
  const std::size_t n = 8001;
  p.elev_m.resize(n);
  Rng rng(12);
  double phases[6];
  for (auto& ph : phases) ph = rng.uniform(0, 2 * std::numbers::pi);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) * p.dx_m;
    double e = 0.0;
    for (int h = 0; h < 6; ++h) {
      const double wavelength = 5.0 + 7.0 * h;
      e += 0.004 * std::cos(2 * std::numbers::pi * x / wavelength + phases[h]);
    }
    p.elev_m[i] = e;
  }
  RoadProfile coarse;
  coarse.dx_m = 0.10;
  for (std::size_t i = 0; i < n; i += 2) coarse.elev_m.push_back(p.elev_m[i]);
  const double fine_iri = compute_iri(p).m_per_km;
  const double coarse_iri = compute_iri(coarse).m_per_km;
  CHECK(std::abs(fine_iri - coarse_iri) / fine_iri < 0.02);
}

TEST_CASE("smoothing: constant profile unchanged") {
  RoadProfile p = flat_profile(20.0);
  for (auto& v : p.elev_m) v = 1.25;
  const auto s = smooth_profile(p);
  for (const double v : s.elev_m) CHECK(v == doctest::Approx(1.25).epsilon(1e-15));
}

TEST_CASE("smoothing spreads a spike into 5 bins of height h/5") {
  RoadProfile p = flat_profile(10.0, 0.05);
  const std::size_t mid = p.elev_m.size() / 2;
  p.elev_m[mid] = 0.35;
  const auto s = smooth_profile(p, 0.25);
  for (std::size_t i = mid - 2; i <= mid + 2; ++i) {
    CHECK(s.elev_m[i] == doctest::Approx(0.35 / 5.0).epsilon(1e-12));
  }
  CHECK(s.elev_m[mid - 3] == 0.0);
  CHECK(s.elev_m[mid + 3] == 0.0);
}

TEST_CASE("smoothing reduces white-noise variance") {
  RoadProfile p = flat_profile(50.0);
  Rng rng(13);
  for (auto& v : p.elev_m) v = rng.normal(0.0, 0.01);
  const auto s = smooth_profile(p);
  auto variance = [](const std::vector<double>& xs) {
    double mean = 0;
    for (const double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0;
    for (const double x : xs) var += (x - mean) * (x - mean);
    return var / static_cast<double>(xs.size());
  };
  CHECK(variance(s.elev_m) < variance(p.elev_m));
}

TEST_CASE("profile CSV round-trips and enforces uniform spacing") {
  const auto p = class_profile(16e-6, 5, 0.02);
  std::ostringstream out;
  write_profile_csv(out, p);
  std::istringstream in(out.str());
  const auto back = read_profile_csv(in);
  REQUIRE(back.elev_m.size() == p.elev_m.size());
  CHECK(back.dx_m == doctest::Approx(p.dx_m).epsilon(1e-12));
  for (std::size_t i = 0; i < p.elev_m.size(); i += 37) {
    CHECK(back.elev_m[i] == p.elev_m[i]);
  }

  std::istringstream bad("x_m,elev_m\n0,0\n0.05,0.001\n0.2,0.002\n");
  CHECK_THROWS_AS(read_profile_csv(bad), MalformedLine);
}
