#include "roadmon/evaluate.hpp"

#include <cmath>
#include <ostream>

#include "roadmon/errors.hpp"
#include "text_util.hpp"

namespace roadmon {

MetricReport metrics(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) throw LengthMismatch("pred/truth lengths differ");
  if (pred.empty()) throw LengthMismatch("metrics need at least one point");

  const auto n = static_cast<double>(pred.size());
  double sq_err = 0.0, abs_pct = 0.0, truth_sum = 0.0;
  bool zero_truth = false;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - truth[i];
    sq_err += e * e;
    truth_sum += truth[i];
    if (truth[i] == 0.0) {
      zero_truth = true;
    } else {
      abs_pct += std::abs(e / truth[i]);
    }
  }
  const double truth_mean = truth_sum / n;
  double truth_var = 0.0;
  for (const double t : truth) {
    const double d = t - truth_mean;
    truth_var += d * d;
  }

  MetricReport report;
  report.n = pred.size();
  report.rmse = std::sqrt(sq_err / n);
  if (!zero_truth) report.mape = 100.0 * abs_pct / n;
  if (truth_var > 0.0) report.r2 = 1.0 - sq_err / truth_var;
  return report;
}

RideClass classify(double iri_in_mi, const RideThresholds& thresholds) {
  if (iri_in_mi < thresholds.good_max_in_mi) return RideClass::Good;
  if (iri_in_mi <= thresholds.fair_max_in_mi) return RideClass::Fair;
  return RideClass::Poor;
}

std::string_view to_string(RideClass c) {
  switch (c) {
    case RideClass::Good: return "Good";
    case RideClass::Fair: return "Fair";
    case RideClass::Poor: return "Poor";
  }
  return "?";
}

std::optional<RideClass> ride_class_from_string(std::string_view s) {
  if (s == "Good") return RideClass::Good;
  if (s == "Fair") return RideClass::Fair;
  if (s == "Poor") return RideClass::Poor;
  return std::nullopt;
}

double classification_accuracy(std::span<const double> pred, std::span<const double> truth,
                               const RideThresholds& thresholds) {
  if (pred.size() != truth.size()) throw LengthMismatch("pred/truth lengths differ");
  if (pred.empty()) throw LengthMismatch("accuracy needs at least one point");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (classify(pred[i], thresholds) == classify(truth[i], thresholds)) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(pred.size());
}

RepeatabilityReport repeatability(const std::vector<std::vector<double>>& runs) {
  if (runs.size() < 2) throw DegenerateData("repeatability needs at least 2 runs");
  const std::size_t n_segments = runs.front().size();
  for (const auto& run : runs) {
    if (run.size() != n_segments) throw LengthMismatch("runs have unequal segment counts");
  }
  if (n_segments == 0) throw LengthMismatch("runs are empty");

  RepeatabilityReport report;
  report.segments.reserve(n_segments);
  const auto n_runs = static_cast<double>(runs.size());
  double cv_sum = 0.0;
  std::size_t cv_count = 0;
  for (std::size_t s = 0; s < n_segments; ++s) {
    double mean = 0.0;
    for (const auto& run : runs) mean += run[s];
    mean /= n_runs;
    double var = 0.0;
    for (const auto& run : runs) {
      const double d = run[s] - mean;
      var += d * d;
    }
    var /= n_runs;  // population SD across runs

    SegmentRepeatability seg;
    seg.index = s;
    seg.mean = mean;
    seg.sd = std::sqrt(var);
    if (mean != 0.0) {
      seg.cv = 100.0 * seg.sd / mean;
      cv_sum += *seg.cv;
      ++cv_count;
      if (*seg.cv > 20.0) ++report.count_cv_over_20;
    }
    report.segments.push_back(seg);
  }
  if (cv_count > 0) report.mean_cv = cv_sum / static_cast<double>(cv_count);
  return report;
}

void write_metric_csv(std::ostream& out, const MetricReport& report) {
  out << "metric,value\n";
  out << "rmse," << detail::format_double(report.rmse) << '\n';
  out << "mape," << (report.mape ? detail::format_double(*report.mape) : std::string()) << '\n';
  out << "r2," << (report.r2 ? detail::format_double(*report.r2) : std::string()) << '\n';
  out << "n," << report.n << '\n';
}

void write_metric_json(std::ostream& out, const MetricReport& report) {
  out << "{\"rmse\":" << detail::format_double(report.rmse);
  out << ",\"mape\":" << (report.mape ? detail::format_double(*report.mape) : "null");
  out << ",\"r2\":" << (report.r2 ? detail::format_double(*report.r2) : "null");
  out << ",\"n\":" << report.n << "}\n";
}

void write_repeatability_csv(std::ostream& out, const RepeatabilityReport& report) {
  out << "index,mean,sd,cv\n";
  for (const auto& seg : report.segments) {
    out << seg.index << ',' << detail::format_double(seg.mean) << ','
        << detail::format_double(seg.sd) << ','
        << (seg.cv ? detail::format_double(*seg.cv) : std::string()) << '\n';
  }
}

}  // namespace roadmon
