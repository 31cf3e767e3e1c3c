#include <doctest.h>

#include <cmath>
#include <sstream>

#include "roadmon/errors.hpp"
#include "roadmon/evaluate.hpp"
#include "roadmon/rng.hpp"

using namespace roadmon;

TEST_CASE("hand-checked metrics") {
  const std::vector<double> truth = {100, 200};
  const std::vector<double> pred = {110, 190};
  const auto r = metrics(pred, truth);
  CHECK(r.rmse == doctest::Approx(10.0).epsilon(1e-12));
  REQUIRE(r.mape.has_value());
  CHECK(*r.mape == doctest::Approx(7.5).epsilon(1e-12));
  REQUIRE(r.r2.has_value());
  CHECK(*r.r2 == doctest::Approx(0.96).epsilon(1e-12));
  CHECK(r.n == 2);
}

TEST_CASE("perfect prediction") {
  const std::vector<double> v = {80, 120, 200, 55};
  const auto r = metrics(v, v);
  CHECK(r.rmse == 0.0);
  CHECK(*r.mape == 0.0);
  CHECK(*r.r2 == 1.0);
}

TEST_CASE("constant truth flags R2 instead of propagating NaN") {
  const std::vector<double> truth = {100, 100, 100};
  const std::vector<double> pred = {90, 100, 110};
  const auto r = metrics(pred, truth);
  CHECK_FALSE(r.r2.has_value());
  CHECK(r.rmse > 0.0);
  CHECK(r.mape.has_value());
}

TEST_CASE("zero truth flags MAPE") {
  const std::vector<double> truth = {0, 100};
  const std::vector<double> pred = {5, 90};
  const auto r = metrics(pred, truth);
  CHECK_FALSE(r.mape.has_value());
  CHECK(r.rmse > 0.0);
}

TEST_CASE("length mismatch and empty input are errors") {
  const std::vector<double> a = {1, 2};
  const std::vector<double> b = {1};
  CHECK_THROWS_AS(metrics(a, b), LengthMismatch);
  CHECK_THROWS_AS(metrics(std::vector<double>{}, std::vector<double>{}), LengthMismatch);
  CHECK_THROWS_AS(classification_accuracy(a, b), LengthMismatch);
}

TEST_CASE("RMSE is symmetric under swapping pred and truth, MAPE is not") {
  const std::vector<double> truth = {100, 150, 220};
  const std::vector<double> pred = {120, 140, 260};
  const auto fwd = metrics(pred, truth);
  const auto rev = metrics(truth, pred);
  CHECK(fwd.rmse == rev.rmse);
  CHECK(*fwd.mape != *rev.mape);
}

TEST_CASE("ride classes per the decided threshold table") {
  CHECK(classify(80) == RideClass::Good);
  CHECK(classify(120) == RideClass::Fair);
  CHECK(classify(200) == RideClass::Poor);
  // both boundaries belong to Fair
  CHECK(classify(95) == RideClass::Fair);
  CHECK(classify(170) == RideClass::Fair);
  CHECK(classify(94.999999) == RideClass::Good);
  CHECK(classify(170.000001) == RideClass::Poor);
}

TEST_CASE("classification is monotone in IRI") {
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const double a = rng.uniform(0, 300);
    const double b = rng.uniform(0, 300);
    const double lo = std::min(a, b), hi = std::max(a, b);
    CHECK(static_cast<int>(classify(lo)) <= static_cast<int>(classify(hi)));
  }
}

TEST_CASE("custom thresholds are honored") {
  const RideThresholds t{50.0, 100.0};
  CHECK(classify(60, t) == RideClass::Fair);
  CHECK(classify(120, t) == RideClass::Poor);
}

TEST_CASE("accuracy extremes") {
  const std::vector<double> truth = {40, 60, 80, 90};
  CHECK(classification_accuracy(truth, truth) == 100.0);
  std::vector<double> shifted(truth);
  for (auto& v : shifted) v += 200.0;
  CHECK(classification_accuracy(shifted, truth) == 0.0);
}

TEST_CASE("accuracy equals the confusion-matrix trace ratio") {
  Rng rng(2);
  std::vector<double> truth(400), pred(400);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    truth[i] = rng.uniform(0, 260);
    pred[i] = truth[i] + rng.normal(0, 40);
    if (pred[i] < 0) pred[i] = 0;
  }
  std::size_t confusion[3][3] = {};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++confusion[static_cast<int>(classify(pred[i]))][static_cast<int>(classify(truth[i]))];
  }
  const double trace = static_cast<double>(confusion[0][0] + confusion[1][1] + confusion[2][2]);
  const double expected = 100.0 * trace / static_cast<double>(truth.size());
  CHECK(classification_accuracy(pred, truth) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("identical runs have zero spread") {
  const std::vector<double> run = {100, 120, 90};
  const auto r = repeatability({run, run, run});
  for (const auto& seg : r.segments) {
    CHECK(seg.sd == 0.0);
    CHECK(*seg.cv == 0.0);
  }
  CHECK(*r.mean_cv == 0.0);
  CHECK(r.count_cv_over_20 == 0);
}

TEST_CASE("hand-checked repeatability: population SD of {100,120} is 10") {
  const auto r = repeatability({{100.0}, {120.0}});
  REQUIRE(r.segments.size() == 1);
  CHECK(r.segments[0].mean == doctest::Approx(110.0));
  CHECK(r.segments[0].sd == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(*r.segments[0].cv == doctest::Approx(100.0 * 10.0 / 110.0).epsilon(1e-12));
}

TEST_CASE("CV is invariant under uniform scaling of all runs") {
  const std::vector<std::vector<double>> runs = {{100, 80, 200}, {110, 78, 190}, {95, 84, 210}};
  const auto base = repeatability(runs);
  std::vector<std::vector<double>> scaled = runs;
  for (auto& run : scaled) {
    for (auto& v : run) v *= 3.7;
  }
  const auto after = repeatability(scaled);
  for (std::size_t s = 0; s < base.segments.size(); ++s) {
    CHECK(*after.segments[s].cv == doctest::Approx(*base.segments[s].cv).epsilon(1e-12));
  }
  CHECK(*after.mean_cv == doctest::Approx(*base.mean_cv).epsilon(1e-12));
}

TEST_CASE("zero-mean segments are flagged and excluded from mean CV") {
  const auto r = repeatability({{0.0, 100.0}, {0.0, 120.0}});
  CHECK_FALSE(r.segments[0].cv.has_value());
  CHECK(r.segments[1].cv.has_value());
  CHECK(*r.mean_cv == doctest::Approx(*r.segments[1].cv));
}

TEST_CASE("segments over 20% CV are counted") {
  const auto r = repeatability({{100, 100}, {160, 101}});  // first segment cv ~23%
  CHECK(r.count_cv_over_20 == 1);
}

TEST_CASE("repeatability input validation") {
  CHECK_THROWS_AS(repeatability({{1.0, 2.0}}), DegenerateData);
  CHECK_THROWS_AS(repeatability({{1.0, 2.0}, {1.0}}), LengthMismatch);
  CHECK_THROWS_AS(repeatability({{}, {}}), LengthMismatch);
}

TEST_CASE("report writers") {
  const std::vector<double> truth = {100, 200};
  const std::vector<double> pred = {110, 190};
  const auto r = metrics(pred, truth);
  std::ostringstream csv;
  write_metric_csv(csv, r);
  CHECK(csv.str().find("rmse,10") != std::string::npos);
  std::ostringstream json;
  write_metric_json(json, r);
  CHECK(json.str().find("\"rmse\":10") != std::string::npos);

  const auto rep = repeatability({{100.0}, {120.0}});
  std::ostringstream rcsv;
  write_repeatability_csv(rcsv, rep);
  CHECK(rcsv.str().rfind("index,mean,sd,cv\n0,110,10,", 0) == 0);
}
