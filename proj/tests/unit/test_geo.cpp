#include <doctest.h>

#include <cmath>
#include <numbers>

#include "roadmon/errors.hpp"
#include "roadmon/geo.hpp"
#include "roadmon/rng.hpp"
#include "support/oracles.hpp"

using namespace roadmon;

namespace {

SensorSample sample_at(double t_ms, double lat, double lon, bool fresh, double speed = 29.0) {
  SensorSample s;
  s.t_ms = t_ms;
  s.az = 9.81;
  s.lat = lat;
  s.lon = lon;
  s.speed = speed;
  s.alt = 231.0;
  s.gps_fresh = fresh;
  return s;
}

}  // namespace

TEST_CASE("haversine zero, symmetry, antipode") {
  CHECK(haversine_km(38.9, -92.2, 38.9, -92.2) == 0.0);
  const double ab = haversine_km(38.9, -92.2, 40.1, -88.3);
  const double ba = haversine_km(40.1, -88.3, 38.9, -92.2);
  CHECK(ab == ba);
  CHECK(haversine_km(0, 0, 0, 180) ==
        doctest::Approx(std::numbers::pi * 6371.0).epsilon(1e-12));
}

TEST_CASE("haversine matches the independent evaluation at interstate-scale endpoints") {
  // frozen before the build from a 40-digit evaluation of the formula
  const double frozen_km = 116.167568708960438;
  const double got = haversine_km(38.958542, -92.206479, 38.809596, -90.878069);
  CHECK(std::abs(got - frozen_km) < 1e-9);
  const double atan2_form =
      oracles::haversine_atan2_km(38.958542, -92.206479, 38.809596, -90.878069, 6371.0);
  CHECK(std::abs(got - atan2_form) < 1e-9);
}

TEST_CASE("haversine triangle inequality on random coordinate triples") {
  Rng rng(2024);
  for (int i = 0; i < 200; ++i) {
    const double lat[3] = {rng.uniform(-89, 89), rng.uniform(-89, 89), rng.uniform(-89, 89)};
    const double lon[3] = {rng.uniform(-179, 179), rng.uniform(-179, 179),
                           rng.uniform(-179, 179)};
    const double ab = haversine_km(lat[0], lon[0], lat[1], lon[1]);
    const double bc = haversine_km(lat[1], lon[1], lat[2], lon[2]);
    const double ac = haversine_km(lat[0], lon[0], lat[2], lon[2]);
    CHECK(ac <= ab + bc + 1e-9);
  }
}

TEST_CASE("constant 65 mph track closes a window roughly every 2020 samples") {
  // 29.06 m/s at 365 Hz, every sample a fresh fix along a meridian
  const double v = 29.06, fs = 365.0;
  const double deg_per_m = 180.0 / (std::numbers::pi * 6371000.0);
  DistanceSegmenter seg;
  std::vector<std::size_t> window_sizes;
  for (std::size_t i = 0; i < 10000; ++i) {
    const double x = v * static_cast<double>(i) / fs;
    auto w = seg.push(sample_at(i * 1000.0 / fs, 38.9 + x * deg_per_m, -92.2, true, v));
    if (w) {
      CHECK_FALSE(w->partial);
      CHECK(w->length_mi >= doctest::Approx(0.1).epsilon(1e-9));
      window_sizes.push_back(w->az_series.size());
    }
  }
  // 160.934 m / 29.06 m/s * 365 Hz = 2021.4 -> 2022 hops to cross; the first
  // window additionally holds the route-start sample
  REQUIRE(window_sizes.size() >= 4);
  CHECK(window_sizes.front() == 2023);
  for (std::size_t i = 1; i < window_sizes.size(); ++i) {
    CHECK(window_sizes[i] >= 2021);
    CHECK(window_sizes[i] <= 2022);
  }
}

TEST_CASE("single sample then end of stream yields one partial window") {
  DistanceSegmenter seg;
  CHECK_FALSE(seg.push(sample_at(0, 38.9, -92.2, true)).has_value());
  const auto w = seg.finalize();
  REQUIRE(w.has_value());
  CHECK(w->partial);
  CHECK(w->az_series.size() == 1);
  CHECK(w->length_mi == 0.0);
  CHECK_FALSE(seg.finalize().has_value());
}

TEST_CASE("an empty stream finalizes to nothing") {
  DistanceSegmenter seg;
  CHECK_FALSE(seg.finalize().has_value());
  CHECK(seg.peak_open_samples() == 0);
}

TEST_CASE("stationary stream never emits from push") {
  DistanceSegmenter seg;
  for (int i = 0; i < 5000; ++i) {
    CHECK_FALSE(seg.push(sample_at(i * 2.739, 38.9, -92.2, i % 73 == 0, 0.0)).has_value());
  }
}

TEST_CASE("samples before the first fix are not windowed") {
  DistanceSegmenter seg;
  for (int i = 0; i < 10; ++i) {
    CHECK_FALSE(seg.push(sample_at(i, 0.0, 0.0, false)).has_value());
  }
  seg.push(sample_at(11, 38.9, -92.2, true));
  const auto w = seg.finalize();
  REQUIRE(w.has_value());
  CHECK(w->az_series.size() == 1);  // only the fix-bearing sample
}

TEST_CASE("partition: windows tile the path with no gaps and no shared samples") {
  Rng rng(77);
  for (int track = 0; track < 5; ++track) {
    DistanceSegmenter seg;
    double lat = 38.9, lon = -92.2;
    double prev_lat = lat, prev_lon = lon;
    double total_path_mi = 0.0;
    std::size_t pushed = 0, windowed = 0;
    double sum_window_mi = 0.0;

    for (int i = 0; i < 4000; ++i) {
      const bool fresh = i % 5 == 0;
      if (fresh && i > 0) {
        lat += rng.uniform(0.5e-5, 6e-5);
        lon += rng.uniform(-3e-5, 3e-5);
      }
      if (fresh) {
        if (i > 0) {
          total_path_mi += haversine_km(prev_lat, prev_lon, lat, lon) * units::kKmToMi;
        }
        prev_lat = lat;
        prev_lon = lon;
      }
      ++pushed;
      if (auto w = seg.push(sample_at(i * 100.0, lat, lon, fresh)); w) {
        sum_window_mi += w->length_mi;
        windowed += w->az_series.size();
      }
    }
    if (auto w = seg.finalize()) {
      sum_window_mi += w->length_mi;
      windowed += w->az_series.size();
    }
    CHECK(windowed == pushed);
    CHECK(sum_window_mi == doctest::Approx(total_path_mi).epsilon(1e-12));
  }
}

TEST_CASE("window emission is independent of accelerometer values") {
  auto run = [](double az_value) {
    DistanceSegmenter seg;
    const double deg_per_m = 180.0 / (std::numbers::pi * 6371000.0);
    std::vector<std::pair<std::size_t, double>> boundaries;
    for (int i = 0; i < 3000; ++i) {
      auto s = sample_at(i * 2.74, 38.9 + 8.0 * i * deg_per_m, -92.2, i % 3 == 0);
      s.az = az_value * (1.0 + 0.01 * i);
      if (auto w = seg.push(s)) boundaries.emplace_back(w->az_series.size(), w->length_mi);
    }
    return boundaries;
  };
  CHECK(run(9.81) == run(-3.0));
}

TEST_CASE("a GPS outage closes the open window as partial") {
  DistanceSegmenter seg;
  const double deg_per_m = 180.0 / (std::numbers::pi * 6371000.0);
  seg.push(sample_at(0, 38.9, -92.2, true));
  seg.push(sample_at(200, 38.9 + 20 * deg_per_m, -92.2, true));
  // fix arrives 8 s after the previous one: outage
  const auto w = seg.push(sample_at(8200, 38.9 + 400 * deg_per_m, -92.2, true));
  REQUIRE(w.has_value());
  CHECK(w->partial);
  CHECK(w->az_series.size() == 2);
  // only the pre-outage 20 m hop counts; the gap adds no distance
  CHECK(w->length_mi == doctest::Approx(0.020 * units::kKmToMi).epsilon(1e-6));
  // the new window starts at the post-outage fix
  const auto tail = seg.finalize();
  REQUIRE(tail.has_value());
  CHECK(tail->az_series.size() == 1);
  CHECK(tail->start_lat == doctest::Approx(38.9 + 400 * deg_per_m));
}

TEST_CASE("window indices increase from route start") {
  DistanceSegmenter seg;
  const double deg_per_m = 180.0 / (std::numbers::pi * 6371000.0);
  std::size_t expected = 0;
  for (int i = 0; i < 40000; ++i) {
    if (auto w = seg.push(sample_at(i * 2.74, 38.9 + 8.0 * i * deg_per_m, -92.2, true))) {
      CHECK(w->index == expected);
      ++expected;
    }
  }
  CHECK(expected > 3);
}
