#include <doctest.h>

#include <cmath>
#include <sstream>

#include "roadmon/errors.hpp"
#include "roadmon/geo.hpp"
#include "roadmon/road_synth.hpp"
#include "roadmon/spectral.hpp"
#include "roadmon/units.hpp"

using namespace roadmon;

TEST_CASE("zero roughness magnitude gives a flat road with IRI zero") {
  SynthConfig cfg;
  cfg.gd_n0 = 0.0;
  cfg.seed = 1;
  cfg.route_len_mi = 0.2;
  const auto p = generate_profile(cfg);
  for (const double v : p.elev_m) CHECK(v == 0.0);
  CHECK(compute_iri(p).m_per_km == 0.0);
}

TEST_CASE("same seed and config give bit-identical profiles, streams, and labels") {
  SynthConfig cfg;
  cfg.seed = 23;
  cfg.route_len_mi = 0.3;
  const auto p1 = generate_profile(cfg);
  const auto p2 = generate_profile(cfg);
  CHECK(p1.elev_m == p2.elev_m);

  const auto s1 = synthesize_stream(p1, cfg);
  const auto s2 = synthesize_stream(p2, cfg);
  REQUIRE(s1.samples.size() == s2.samples.size());
  CHECK(s1.samples == s2.samples);
  REQUIRE(s1.labels.size() == s2.labels.size());
  for (std::size_t i = 0; i < s1.labels.size(); ++i) {
    CHECK(s1.labels[i].iri_in_per_mi == s2.labels[i].iri_in_per_mi);
  }
}

TEST_CASE("class tiers are ordered by roughness") {
  double last = 0.0;
  for (const auto cls : {RoadClass::A, RoadClass::B, RoadClass::C}) {
    SynthConfig cfg;
    cfg.road_class = cls;
    cfg.seed = 5;
    cfg.route_len_mi = 0.2;
    const double iri = compute_iri(generate_profile(cfg)).in_per_mi;
    CHECK(iri > last);
    last = iri;
  }
}

TEST_CASE("one mile yields exactly ten labeled segments") {
  SynthConfig cfg;
  cfg.seed = 7;
  cfg.route_len_mi = 1.0;
  const auto stream = synthesize_stream(generate_profile(cfg), cfg);
  CHECK(stream.labels.size() == 10);
  for (std::size_t i = 0; i < stream.labels.size(); ++i) {
    CHECK(stream.labels[i].index == i);
    CHECK(stream.labels[i].iri_in_per_mi >= 0.0);
    CHECK(stream.labels[i].iri_in_per_mi ==
          doctest::Approx(stream.labels[i].iri_m_per_km * units::kInMiPerMKm));
  }
}

TEST_CASE("noiseless flat road reads exactly gravity") {
  SynthConfig cfg;
  cfg.gd_n0 = 0.0;
  cfg.noise_sigma = 0.0;
  cfg.seed = 2;
  cfg.route_len_mi = 0.2;
  const auto stream = synthesize_stream(generate_profile(cfg), cfg);
  REQUIRE(!stream.samples.empty());
  for (const auto& s : stream.samples) CHECK(s.az == units::kGravityMps2);
}

TEST_CASE("segment windows align one-to-one with labels, speeds within 2%") {
  for (const double mph : {45.0, 50.0, 65.0, 70.0}) {
    SynthConfig cfg;
    cfg.seed = 11;
    cfg.route_len_mi = 1.0;
    cfg.speed_profile = {{1.0, units::mph_to_mps(mph)}};
    const auto stream = synthesize_stream(generate_profile(cfg), cfg);

    DistanceSegmenter seg;
    std::size_t full = 0, partial = 0;
    double mean_speed = 0.0;
    for (const auto& s : stream.samples) {
      if (auto w = seg.push(s)) {
        if (w->partial) {
          ++partial;
        } else {
          ++full;
          const auto f = extract_features(*w);
          mean_speed = f.mean_speed;
          CHECK(f.mean_speed == doctest::Approx(units::mph_to_mps(mph)).epsilon(0.02));
        }
      }
    }
    if (seg.finalize()) ++partial;
    CHECK(full == stream.labels.size());
    CHECK(partial == 0);
    CHECK(mean_speed > 0.0);
  }
}

TEST_CASE("piecewise speed profiles keep windows aligned across stretches") {
  SynthConfig cfg;
  cfg.seed = 3;
  cfg.speed_profile = {{0.5, units::mph_to_mps(65.0)}, {0.5, units::mph_to_mps(45.0)}};
  const auto stream = synthesize_stream(generate_profile(cfg), cfg);
  CHECK(stream.labels.size() == 10);
  DistanceSegmenter seg;
  std::size_t full = 0;
  for (const auto& s : stream.samples) {
    if (auto w = seg.push(s); w && !w->partial) ++full;
  }
  CHECK(full == 10);
}

TEST_CASE("labels are independent of sensor noise") {
  SynthConfig a;
  a.seed = 17;
  a.route_len_mi = 0.3;
  a.noise_sigma = 0.0;
  SynthConfig b = a;
  b.noise_sigma = 0.4;
  const auto profile = generate_profile(a);
  const auto sa = synthesize_stream(profile, a);
  const auto sb = synthesize_stream(profile, b);
  REQUIRE(sa.labels.size() == sb.labels.size());
  for (std::size_t i = 0; i < sa.labels.size(); ++i) {
    CHECK(sa.labels[i].iri_in_per_mi == sb.labels[i].iri_in_per_mi);
  }
}

TEST_CASE("monotone difficulty: mean label IRI rises with gd_n0 over 20 seeds") {
  const double tiers[3] = {4e-6, 16e-6, 64e-6};
  double means[3] = {0, 0, 0};
  for (int t = 0; t < 3; ++t) {
    double sum = 0.0;
    int count = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      SynthConfig cfg;
      cfg.gd_n0 = tiers[t];
      cfg.seed = seed;
      cfg.route_len_mi = 0.2;
      const auto labels = profile_labels(generate_profile(cfg), cfg.route_len_mi);
      for (const auto& l : labels) {
        sum += l.iri_in_per_mi;
        ++count;
      }
    }
    means[t] = sum / count;
  }
  CHECK(means[0] < means[1]);
  CHECK(means[1] < means[2]);
}

TEST_CASE("wander perturbs the ridden line but preserves roughness scale") {
  SynthConfig base;
  base.seed = 29;
  base.route_len_mi = 0.2;
  const auto p0 = generate_profile(base);

  SynthConfig w1 = base;
  w1.wander = 0.2;
  w1.run_id = 1;
  SynthConfig w2 = base;
  w2.wander = 0.2;
  w2.run_id = 2;
  const auto pa = generate_profile(w1);
  const auto pb = generate_profile(w2);
  CHECK(pa.elev_m != pb.elev_m);
  CHECK(pa.elev_m != p0.elev_m);

  const double iri0 = compute_iri(p0).in_per_mi;
  const double iria = compute_iri(pa).in_per_mi;
  const double irib = compute_iri(pb).in_per_mi;
  CHECK(std::abs(iria - iri0) / iri0 < 0.35);
  CHECK(std::abs(irib - iri0) / iri0 < 0.35);

  // wander off reproduces the base road exactly
  SynthConfig w0 = base;
  w0.wander = 0.0;
  w0.run_id = 9;
  CHECK(generate_profile(w0).elev_m == p0.elev_m);
}

TEST_CASE("stream synthesis rejects a profile shorter than the route") {
  SynthConfig cfg;
  cfg.seed = 4;
  cfg.route_len_mi = 1.0;
  SynthConfig small = cfg;
  small.route_len_mi = 0.1;
  const auto p = generate_profile(small);
  CHECK_THROWS_AS(synthesize_stream(p, cfg), ProfileTooShort);
}

TEST_CASE("labels CSV round-trips") {
  SynthConfig cfg;
  cfg.seed = 8;
  cfg.route_len_mi = 0.3;
  const auto stream = synthesize_stream(generate_profile(cfg), cfg);
  std::ostringstream out;
  write_labels_csv(out, stream.labels);
  std::istringstream in(out.str());
  const auto back = read_labels_csv(in);
  REQUIRE(back.size() == stream.labels.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].index == stream.labels[i].index);
    CHECK(back[i].iri_m_per_km == stream.labels[i].iri_m_per_km);
    CHECK(back[i].iri_in_per_mi == stream.labels[i].iri_in_per_mi);
  }
}

TEST_CASE("rough windows dominate smooth windows feature-wise at equal speed") {
  SynthConfig smooth;
  smooth.road_class = RoadClass::A;
  smooth.seed = 40;
  smooth.route_len_mi = 0.2;
  smooth.noise_sigma = 0.0;
  SynthConfig rough = smooth;
  rough.road_class = RoadClass::D;

  auto first_features = [](const SynthConfig& cfg) {
    const auto stream = synthesize_stream(generate_profile(cfg), cfg);
    DistanceSegmenter seg;
    for (const auto& s : stream.samples) {
      if (auto w = seg.push(s); w && !w->partial) return extract_features(*w);
    }
    throw std::runtime_error("no window");
  };
  const auto fa = first_features(smooth);
  const auto fd = first_features(rough);
  CHECK(fd.auc > fa.auc);
  CHECK(fd.mxp > fa.mxp);
  CHECK(fd.mp > fa.mp);
  CHECK(fd.sdp > fa.sdp);
}
