#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace roadmon {

/// RMSE / MAPE / R^2 over aligned prediction/truth vectors. MAPE and R^2 are
/// flagged absent (nullopt) rather than NaN when their denominators vanish:
/// MAPE needs strictly nonzero truth, R^2 needs nonconstant truth.
struct MetricReport {
  double rmse = 0.0;            // in/mi
  std::optional<double> mape;   // percent, denominator = ground truth
  std::optional<double> r2;
  std::size_t n = 0;
};

MetricReport metrics(std::span<const double> pred, std::span<const double> truth);

/// MAP-21 style ride quality from IRI. Both boundaries belong to Fair.
enum class RideClass { Good, Fair, Poor };

struct RideThresholds {
  double good_max_in_mi = 95.0;
  double fair_max_in_mi = 170.0;
};

RideClass classify(double iri_in_mi, const RideThresholds& thresholds = {});
std::string_view to_string(RideClass c);
std::optional<RideClass> ride_class_from_string(std::string_view s);

/// Percent of segments whose predicted and true ride classes match.
double classification_accuracy(std::span<const double> pred, std::span<const double> truth,
                               const RideThresholds& thresholds = {});

/// Run-to-run repeatability per segment: population SD across runs and
/// CV = 100 * sd / mean. Segments whose mean is 0 are flagged (cv absent) and
/// excluded from mean_cv.
struct SegmentRepeatability {
  std::size_t index = 0;
  double mean = 0.0;
  double sd = 0.0;
  std::optional<double> cv;  // percent
};

struct RepeatabilityReport {
  std::vector<SegmentRepeatability> segments;
  std::optional<double> mean_cv;     // percent, over segments with a valid cv
  std::size_t count_cv_over_20 = 0;  // segments with cv > 20%
};

/// runs: one IRI vector per repetition, aligned by segment ordinal.
/// Requires >= 2 runs of equal length.
RepeatabilityReport repeatability(const std::vector<std::vector<double>>& runs);

/// metric,value rows (absent metrics emitted as empty values)
void write_metric_csv(std::ostream& out, const MetricReport& report);
void write_metric_json(std::ostream& out, const MetricReport& report);

/// index,mean,sd,cv rows
void write_repeatability_csv(std::ostream& out, const RepeatabilityReport& report);

}  // namespace roadmon
