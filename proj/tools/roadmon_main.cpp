// roadmon CLI: every pipeline stage and experiment as a reproducible,
// seeded subcommand. See README.md for a walkthrough.

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "manifest.hpp"
#include "roadmon/errors.hpp"
#include "roadmon/evaluate.hpp"
#include "roadmon/geo.hpp"
#include "roadmon/ingest.hpp"
#include "roadmon/pipeline.hpp"
#include "roadmon/quarter_car.hpp"
#include "roadmon/road_synth.hpp"
#include "roadmon/rng.hpp"
#include "roadmon/spectral.hpp"
#include "roadmon/tree_ensemble.hpp"
#include "roadmon/units.hpp"

namespace fs = std::filesystem;
using namespace roadmon;

namespace {

constexpr const char* kVersion = "1.0.0";

struct GlobalOpts {
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool lenient = false;
};

fs::path out_path(const GlobalOpts& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot open output file " + p.string());
  return f;
}

std::ifstream open_in(const std::string& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw Error("cannot open input file " + p);
  return f;
}

// diagnostics name file, line (from the parser), and stage
template <typename Fn>
auto with_context(const std::string& file, const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(file + ": " + stage + ": " + e.what());
  }
}

class ManifestWriter {
 public:
  ManifestWriter(const GlobalOpts& g, std::string subcommand)
      : global_(g), start_(std::chrono::steady_clock::now()) {
    manifest_.subcommand = std::move(subcommand);
    manifest_.tool_version = kVersion;
    manifest_.seed = g.seed;
  }

  void config(const std::string& key, const std::string& value) {
    manifest_.config.emplace_back(key, value);
  }
  void config(const std::string& key, double value) {
    config(key, detail_format(value));
  }
  void input(const fs::path& p) { manifest_.inputs.push_back(p.string()); }
  void output(const fs::path& p) { manifest_.outputs.push_back(p.string()); }

  void write(const std::string& name = "manifest.json") {
    const auto wall = std::chrono::steady_clock::now() - start_;
    manifest_.wall_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(wall).count();
    auto f = open_out(out_path(global_, name));
    f << manifest_.to_json().dump(2) << '\n';
  }

 private:
  static std::string detail_format(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  }

  const GlobalOpts& global_;
  std::chrono::steady_clock::time_point start_;
  cli::RunManifest manifest_;
};

// ---------------------------------------------------------------------------
// predictions CSV: index,iri_pred_inmi,ride_class

struct PredictionRow {
  std::size_t index = 0;
  double iri_in_mi = 0.0;
  RideClass ride_class = RideClass::Good;
};

void write_predictions_csv(std::ostream& out, const std::vector<PredictionRow>& rows) {
  out << "index,iri_pred_inmi,ride_class\n";
  for (const auto& r : rows) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), r.iri_in_mi);
    out << r.index << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf)) << ','
        << to_string(r.ride_class) << '\n';
  }
}

std::vector<PredictionRow> read_predictions_csv(std::istream& in) {
  std::vector<PredictionRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header) {
      if (line != "index,iri_pred_inmi,ride_class") {
        throw MalformedLine(line_no, "bad predictions header");
      }
      header = true;
      continue;
    }
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string idx, iri, cls;
    if (!std::getline(row, idx, ',') || !std::getline(row, iri, ',') || !std::getline(row, cls)) {
      throw MalformedLine(line_no, "expected 3 fields");
    }
    PredictionRow r;
    try {
      r.index = std::stoull(idx);
      r.iri_in_mi = std::stod(iri);
    } catch (const std::exception&) {
      throw MalformedLine(line_no, "unparsable prediction row");
    }
    const auto c = ride_class_from_string(cls);
    if (!c) throw MalformedLine(line_no, "unknown ride class '" + cls + "'");
    r.ride_class = *c;
    rows.push_back(r);
  }
  if (!header) throw MalformedLine(0, "empty predictions file");
  return rows;
}

// joined feature/label rows, aligned by segment index
struct JoinedData {
  std::vector<FeatureRow> X;
  std::vector<double> y;
};

JoinedData join_on_index(const std::vector<SegmentFeatures>& features,
                         const std::vector<SegmentLabel>& labels) {
  std::map<std::size_t, double> by_index;
  for (const auto& l : labels) by_index[l.index] = l.iri_in_per_mi;
  JoinedData joined;
  for (const auto& f : features) {
    const auto it = by_index.find(f.index);
    if (it == by_index.end()) {
      throw JoinMismatch("no label for segment index " + std::to_string(f.index));
    }
    joined.X.push_back(feature_vector(f));
    joined.y.push_back(it->second);
  }
  if (joined.X.empty()) throw JoinMismatch("no joinable rows");
  return joined;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const GlobalOpts& g, const std::string& cls, std::optional<double> gd_n0,
                 double route_mi, std::vector<double> speeds_mph,
                 std::vector<double> stretch_mi, double noise_sigma, double fs, double gps_rate,
                 double wander, std::uint64_t run_id, const std::string& prefix,
                 bool emit_profile) {
  ManifestWriter manifest(g, "simulate");

  SynthConfig cfg;
  if (cls.size() != 1 || cls[0] < 'A' || cls[0] > 'E') {
    throw ConfigError("--class must be one of A..E");
  }
  cfg.road_class = static_cast<RoadClass>(cls[0] - 'A');
  cfg.gd_n0 = gd_n0;
  cfg.seed = g.seed;
  cfg.route_len_mi = route_mi;
  cfg.noise_sigma = noise_sigma;
  cfg.fs_hz = fs;
  cfg.gps_rate_hz = gps_rate;
  cfg.wander = wander;
  cfg.run_id = run_id;
  if (!speeds_mph.empty()) {
    if (stretch_mi.empty()) {
      cfg.speed_profile.push_back({route_mi, units::mph_to_mps(speeds_mph.front())});
      if (speeds_mph.size() > 1) throw ConfigError("--stretch-mi required for multiple speeds");
    } else if (stretch_mi.size() == speeds_mph.size()) {
      for (std::size_t i = 0; i < speeds_mph.size(); ++i) {
        cfg.speed_profile.push_back({stretch_mi[i], units::mph_to_mps(speeds_mph[i])});
      }
    } else {
      throw ConfigError("--speed-mph and --stretch-mi must pair up");
    }
  }

  manifest.config("class", cls);
  if (gd_n0) manifest.config("gd_n0", *gd_n0);
  manifest.config("route_mi", route_mi);
  manifest.config("noise_sigma", noise_sigma);
  manifest.config("fs_hz", fs);
  manifest.config("gps_rate_hz", gps_rate);
  manifest.config("wander", wander);
  manifest.config("run_id", static_cast<double>(run_id));

  const RoadProfile profile = generate_profile(cfg);

  const fs::path stream_path = out_path(g, prefix + "_stream.csv");
  const fs::path labels_path = out_path(g, prefix + "_labels.csv");
  {
    auto stream_f = open_out(stream_path);
    stream_f << kCanonicalCsvHeader << '\n';
    StreamMeta meta;
    meta.sample_rate_hz = fs;
    std::vector<SegmentLabel> labels;
    synthesize_stream(profile, cfg, GoldenCarParams{},
                      [&](const SensorSample& s) { append_canonical_row(stream_f, s, meta); },
                      &labels);
    auto labels_f = open_out(labels_path);
    write_labels_csv(labels_f, labels);
    std::cout << "simulate: " << labels.size() << " segments, stream " << stream_path.string()
              << '\n';
  }
  manifest.output(stream_path);
  manifest.output(labels_path);

  if (emit_profile) {
    const fs::path profile_path = out_path(g, prefix + "_profile.csv");
    auto f = open_out(profile_path);
    write_profile_csv(f, profile);
    manifest.output(profile_path);
  }
  manifest.write(prefix + "_manifest.json");
  return 0;
}

int cmd_ingest(const GlobalOpts& g, const std::string& in, const std::string& out_name) {
  ManifestWriter manifest(g, "ingest");
  manifest.input(in);
  auto f = open_in(in);
  StreamMeta meta;
  ParseStats stats;
  const std::vector<SensorSample> samples =
      with_context(in, "ingest", [&] { return parse_device_log(f, meta, g.lenient, &stats); });
  const fs::path out = out_path(g, out_name);
  auto of = open_out(out);
  write_canonical_csv(of, samples, meta);
  manifest.output(out);
  manifest.write("ingest_manifest.json");
  std::cout << "ingest: " << stats.emitted << " rows emitted, " << stats.skipped << " skipped\n";
  return 0;
}

int cmd_features(const GlobalOpts& g, const std::string& in, const std::string& out_name) {
  ManifestWriter manifest(g, "features");
  manifest.input(in);
  auto f = open_in(in);

  DeviceLogParser parser(StreamMeta{}, g.lenient);
  DistanceSegmenter segmenter;
  std::vector<SegmentFeatures> rows;
  with_context(in, "features", [&] {
    std::string line;
    bool any = false;
    while (std::getline(f, line)) {
      any = true;
      if (auto s = parser.feed_line(line)) {
        if (auto window = segmenter.push(*s); window && !window->partial) {
          rows.push_back(extract_features(*window));
        }
      }
    }
    if (!any) throw NoGpsFix();
    parser.finish();
    segmenter.finalize();  // partial windows excluded
  });

  const fs::path out = out_path(g, out_name);
  auto of = open_out(out);
  write_feature_csv(of, rows);
  manifest.output(out);
  manifest.write("features_manifest.json");
  std::cout << "features: " << rows.size() << " segments\n";
  return 0;
}

int cmd_train(const GlobalOpts& g, const std::string& features_path,
              const std::string& labels_path, const std::string& mode, int n_trees,
              int max_depth, int min_leaf, double learning_rate, double row_subsample,
              double feature_subsample, int histogram_bins, double holdout, bool block_split,
              const std::string& model_name) {
  ManifestWriter manifest(g, "train");
  manifest.input(features_path);
  manifest.input(labels_path);

  auto ff = open_in(features_path);
  auto lf = open_in(labels_path);
  const auto features = read_feature_csv(ff);
  const auto labels = read_labels_csv(lf);
  const JoinedData data = join_on_index(features, labels);
  if (data.X.size() < 20) throw DegenerateData("training needs at least 20 joined rows");

  // deterministic 80/20 split; --block-split holds out the trailing block
  // instead of a random shuffle (distribution-shift experiments)
  std::vector<std::size_t> order(data.X.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (!block_split) {
    Rng rng = Rng(g.seed).spawn(0x73706c69ULL);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.uniform_index(i)]);
    }
  }
  const auto n_test = static_cast<std::size_t>(
      std::llround(holdout * static_cast<double>(order.size())));
  std::vector<FeatureRow> x_train, x_test;
  std::vector<double> y_train, y_test;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const bool test = block_split ? i >= order.size() - n_test : i < n_test;
    (test ? x_test : x_train).push_back(data.X[order[i]]);
    (test ? y_test : y_train).push_back(data.y[order[i]]);
  }

  FitConfig cfg;
  EnsembleModel model;
  if (mode == "tree") {
    cfg.n_trees = 1;
    cfg.bootstrap = false;
    cfg.feature_subsample = 1.0;
  } else if (mode == "bagged") {
    cfg = bagged_defaults();
  } else if (mode == "boosted") {
    cfg = boosted_defaults();
  } else {
    throw ConfigError("--mode must be tree, bagged, or boosted");
  }
  if (n_trees > 0 && mode != "tree") cfg.n_trees = n_trees;
  if (max_depth > 0) cfg.max_depth = max_depth;
  if (min_leaf > 0) cfg.min_samples_leaf = min_leaf;
  if (learning_rate > 0) cfg.learning_rate = learning_rate;
  if (row_subsample > 0) cfg.row_subsample = row_subsample;
  if (feature_subsample > 0) cfg.feature_subsample = feature_subsample;
  cfg.histogram_bins = histogram_bins;
  cfg.seed = g.seed;

  model = (mode == "boosted") ? fit_boosted(x_train, y_train, cfg)
                              : fit_bagged(x_train, y_train, cfg);

  const fs::path model_path = out_path(g, model_name);
  {
    auto mf = open_out(model_path);
    save_model(mf, model);
  }
  manifest.output(model_path);

  manifest.config("mode", mode);
  manifest.config("n_trees", static_cast<double>(cfg.n_trees));
  manifest.config("max_depth", static_cast<double>(cfg.max_depth));
  manifest.config("min_samples_leaf", static_cast<double>(cfg.min_samples_leaf));
  manifest.config("learning_rate", cfg.learning_rate);
  manifest.config("row_subsample", cfg.row_subsample);
  manifest.config("feature_subsample", cfg.feature_subsample);
  manifest.config("histogram_bins", static_cast<double>(cfg.histogram_bins));
  manifest.config("holdout", holdout);
  manifest.config("block_split", block_split ? "true" : "false");

  MetricReport report;
  if (!x_test.empty()) {
    const std::vector<double> pred = predict(model, x_test);
    report = metrics(pred, y_test);
    const fs::path report_csv = out_path(g, "train_report.csv");
    const fs::path report_json = out_path(g, "train_report.json");
    {
      auto rf = open_out(report_csv);
      write_metric_csv(rf, report);
    }
    {
      auto rf = open_out(report_json);
      write_metric_json(rf, report);
    }
    manifest.output(report_csv);
    manifest.output(report_json);
    std::cout << "train[" << mode << "]: " << x_train.size() << " train / " << x_test.size()
              << " held out, rmse " << report.rmse;
    if (report.r2) std::cout << ", r2 " << *report.r2;
    std::cout << '\n';
  } else {
    std::cout << "train[" << mode << "]: " << x_train.size() << " rows, no holdout\n";
  }
  manifest.write("train_manifest.json");
  return 0;
}

int cmd_predict(const GlobalOpts& g, const std::string& model_path,
                const std::string& features_path, const std::string& out_name, double good_max,
                double fair_max) {
  ManifestWriter manifest(g, "predict");
  manifest.input(model_path);
  manifest.input(features_path);
  auto mf = open_in(model_path);
  const EnsembleModel model = load_model(mf);
  auto ff = open_in(features_path);
  const auto features = read_feature_csv(ff);

  const RideThresholds thresholds{good_max, fair_max};
  std::vector<PredictionRow> rows;
  rows.reserve(features.size());
  for (const auto& f : features) {
    PredictionRow r;
    r.index = f.index;
    r.iri_in_mi = predict(model, feature_vector(f));
    r.ride_class = classify(r.iri_in_mi, thresholds);
    rows.push_back(r);
  }
  const fs::path out = out_path(g, out_name);
  auto of = open_out(out);
  write_predictions_csv(of, rows);
  manifest.output(out);
  manifest.write("predict_manifest.json");
  std::cout << "predict: " << rows.size() << " segments\n";
  return 0;
}

// aligned pred/truth vectors from prediction rows and labels, joined by index
std::pair<std::vector<double>, std::vector<double>> align_pred_truth(
    const std::vector<PredictionRow>& preds, const std::vector<SegmentLabel>& labels) {
  std::map<std::size_t, double> truth;
  for (const auto& l : labels) truth[l.index] = l.iri_in_per_mi;
  std::vector<double> p, t;
  for (const auto& r : preds) {
    const auto it = truth.find(r.index);
    if (it == truth.end()) throw JoinMismatch("no label for index " + std::to_string(r.index));
    p.push_back(r.iri_in_mi);
    t.push_back(it->second);
  }
  if (p.empty()) throw JoinMismatch("no joinable rows");
  return {p, t};
}

int cmd_evaluate(const GlobalOpts& g, const std::string& pred_path,
                 const std::string& labels_path, double good_max, double fair_max) {
  ManifestWriter manifest(g, "evaluate");
  manifest.input(pred_path);
  manifest.input(labels_path);
  auto pf = open_in(pred_path);
  auto lf = open_in(labels_path);
  const auto preds = read_predictions_csv(pf);
  const auto labels = read_labels_csv(lf);
  const auto [p, t] = align_pred_truth(preds, labels);

  const MetricReport report = metrics(p, t);
  const double accuracy = classification_accuracy(p, t, RideThresholds{good_max, fair_max});

  const fs::path csv = out_path(g, "evaluate_report.csv");
  {
    auto f = open_out(csv);
    write_metric_csv(f, report);
    f << "classification_accuracy," << accuracy << '\n';
  }
  const fs::path json = out_path(g, "evaluate_report.json");
  {
    auto f = open_out(json);
    std::ostringstream metric_json;
    write_metric_json(metric_json, report);
    std::string body = metric_json.str();
    body = body.substr(0, body.rfind('}'));
    f << body << ",\"classification_accuracy\":" << accuracy << "}\n";
  }
  manifest.output(csv);
  manifest.output(json);
  manifest.write("evaluate_manifest.json");
  std::cout << "evaluate: rmse " << report.rmse;
  if (report.mape) std::cout << ", mape " << *report.mape << '%';
  if (report.r2) std::cout << ", r2 " << *report.r2;
  std::cout << ", class accuracy " << accuracy << "%\n";
  return 0;
}

std::vector<std::vector<double>> load_runs(const std::vector<std::string>& run_paths) {
  std::vector<std::vector<double>> runs;
  for (const auto& path : run_paths) {
    auto f = open_in(path);
    const auto rows = read_predictions_csv(f);
    std::vector<double> iri(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) iri[i] = rows[i].iri_in_mi;
    runs.push_back(std::move(iri));
  }
  return runs;
}

int cmd_repeatability(const GlobalOpts& g, const std::vector<std::string>& run_paths) {
  ManifestWriter manifest(g, "repeatability");
  for (const auto& p : run_paths) manifest.input(p);
  const RepeatabilityReport report = repeatability(load_runs(run_paths));

  const fs::path csv = out_path(g, "repeatability.csv");
  {
    auto f = open_out(csv);
    write_repeatability_csv(f, report);
  }
  const fs::path json = out_path(g, "repeatability.json");
  {
    auto f = open_out(json);
    f << "{\"mean_cv\":";
    if (report.mean_cv) {
      f << *report.mean_cv;
    } else {
      f << "null";
    }
    f << ",\"count_cv_over_20\":" << report.count_cv_over_20
      << ",\"segments\":" << report.segments.size() << "}\n";
  }
  manifest.output(csv);
  manifest.output(json);
  manifest.write("repeatability_manifest.json");
  std::cout << "repeatability: " << report.segments.size() << " segments";
  if (report.mean_cv) std::cout << ", mean cv " << *report.mean_cv << '%';
  std::cout << ", " << report.count_cv_over_20 << " over 20%\n";
  return 0;
}

int cmd_pipeline(const GlobalOpts& g, const std::string& in, const std::string& model_path,
                 const std::string& out_name, bool include_partial, bool stats, double good_max,
                 double fair_max) {
  ManifestWriter manifest(g, "pipeline");
  manifest.input(in);
  manifest.input(model_path);
  auto mf = open_in(model_path);
  const EnsembleModel model = load_model(mf);

  std::ofstream file_out;
  std::ostream* target = &std::cout;
  fs::path out;
  if (out_name != "-") {
    out = out_path(g, out_name);
    file_out = open_out(out);
    target = &file_out;
    manifest.output(out);
  }
  OstreamSink sink(*target);

  PipelineConfig cfg;
  cfg.include_partial = include_partial;
  cfg.thresholds = RideThresholds{good_max, fair_max};

  auto f = open_in(in);
  DeviceLogParser parser(StreamMeta{}, g.lenient);

  const auto t0 = std::chrono::steady_clock::now();
  EdgePipeline pipeline(model, cfg, &sink);
  with_context(in, "pipeline", [&] {
    std::string line;
    bool any = false;
    while (std::getline(f, line)) {
      any = true;
      if (auto s = parser.feed_line(line)) pipeline.push(*s);
    }
    if (!any) throw NoGpsFix();
    parser.finish();
    pipeline.finish();
  });
  const auto t1 = std::chrono::steady_clock::now();

  PipelineStats st = pipeline.stats();
  st.wall_us = std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();
  if (stats) {
    *target << "{\"segments\":" << st.segments << ",\"samples\":" << st.samples
            << ",\"lat_us_p50\":" << st.p50_latency_us << ",\"lat_us_p95\":" << st.p95_latency_us
            << ",\"peak_window_samples\":" << st.peak_window_samples
            << ",\"wall_us\":" << st.wall_us << "}\n";
    target->flush();
  }
  manifest.write("pipeline_manifest.json");
  if (target != &std::cout) {
    std::cout << "pipeline: " << st.segments << " records, " << st.samples << " samples\n";
  }
  return 0;
}

int cmd_plot_data(const GlobalOpts& g, const std::string& chart, const std::string& pred_path,
                  const std::string& labels_path, const std::vector<std::string>& run_paths,
                  const std::string& out_name) {
  ManifestWriter manifest(g, "plot-data");
  const fs::path out = out_path(g, out_name);
  auto of = open_out(out);

  if (chart == "scatter" || chart == "line") {
    if (pred_path.empty() || labels_path.empty()) {
      throw ConfigError("--pred and --labels required for " + chart);
    }
    manifest.input(pred_path);
    manifest.input(labels_path);
    auto pf = open_in(pred_path);
    auto lf = open_in(labels_path);
    const auto preds = read_predictions_csv(pf);
    const auto labels = read_labels_csv(lf);
    const auto [p, t] = align_pred_truth(preds, labels);
    if (chart == "scatter") {
      of << "truth_inmi,pred_inmi\n";
      for (std::size_t i = 0; i < p.size(); ++i) of << t[i] << ',' << p[i] << '\n';
    } else {
      of << "index,truth_inmi,pred_inmi\n";
      for (std::size_t i = 0; i < p.size(); ++i) {
        of << preds[i].index << ',' << t[i] << ',' << p[i] << '\n';
      }
    }
  } else if (chart == "pie") {
    if (pred_path.empty()) throw ConfigError("--pred required for pie");
    manifest.input(pred_path);
    auto pf = open_in(pred_path);
    const auto preds = read_predictions_csv(pf);
    std::size_t counts[3] = {0, 0, 0};
    for (const auto& r : preds) ++counts[static_cast<int>(r.ride_class)];
    of << "class,count\n";
    of << "Good," << counts[0] << "\nFair," << counts[1] << "\nPoor," << counts[2] << '\n';
  } else if (chart == "repeatability") {
    if (run_paths.size() < 2) throw ConfigError("need >= 2 --run files for repeatability");
    for (const auto& p : run_paths) manifest.input(p);
    const RepeatabilityReport report = repeatability(load_runs(run_paths));
    write_repeatability_csv(of, report);
  } else {
    throw ConfigError("--chart must be scatter, line, pie, or repeatability");
  }
  manifest.output(out);
  manifest.write("plot_data_manifest.json");
  std::cout << "plot-data[" << chart << "]: " << out.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Axle-telemetry road roughness toolkit"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "INI config file (flags override file values)");
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--out-dir", g.out_dir, "Directory for outputs")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for all randomness")->capture_default_str();
  app.add_flag("--lenient", g.lenient, "Skip malformed log rows instead of failing");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic labeled route");
  std::string sim_class = "B";
  std::optional<double> sim_gd;
  double sim_route = 1.0, sim_noise = 0.05, sim_fs = 365.0, sim_gps = 5.0, sim_wander = 0.0;
  std::uint64_t sim_run = 0;
  std::vector<double> sim_speeds, sim_stretches;
  std::string sim_prefix = "sim";
  bool sim_profile = false;
  sim->add_option("--class", sim_class, "Roughness class A..E")->capture_default_str();
  sim->add_option("--gd-n0", sim_gd, "Displacement PSD at 0.1 cycles/m, m^3 (overrides class)");
  sim->add_option("--route-mi", sim_route, "Route length, miles")->capture_default_str();
  sim->add_option("--speed-mph", sim_speeds, "Speed per stretch, mph (default 65)");
  sim->add_option("--stretch-mi", sim_stretches, "Stretch lengths pairing --speed-mph");
  sim->add_option("--noise-sigma", sim_noise, "Accelerometer noise std, m/s^2")
      ->capture_default_str();
  sim->add_option("--fs", sim_fs, "Sample rate, Hz")->capture_default_str();
  sim->add_option("--gps-rate", sim_gps, "GPS fix rate, Hz")->capture_default_str();
  sim->add_option("--wander", sim_wander, "Run-to-run path variation in [0,1)")
      ->capture_default_str();
  sim->add_option("--run-id", sim_run, "Run identity for wander/noise streams")
      ->capture_default_str();
  sim->add_option("--out-prefix", sim_prefix, "Output file prefix")->capture_default_str();
  sim->add_flag("--emit-profile", sim_profile, "Also write the road profile CSV");

  // ingest
  auto* ing = app.add_subcommand("ingest", "Validate and normalize a device log");
  std::string ing_in, ing_out = "canonical.csv";
  ing->add_option("--in", ing_in, "Device log file")->required();
  ing->add_option("--out", ing_out, "Canonical CSV output")->capture_default_str();

  // features
  auto* feat = app.add_subcommand("features", "Segment a stream and extract features");
  std::string feat_in, feat_out = "features.csv";
  feat->add_option("--in", feat_in, "Canonical CSV stream")->required();
  feat->add_option("--out", feat_out, "Feature table output")->capture_default_str();

  // train
  auto* train = app.add_subcommand("train", "Fit an ensemble on features + labels");
  std::string train_features, train_labels, train_mode = "boosted", train_model = "model.txt";
  int train_trees = 0, train_depth = 0, train_leaf = 0, train_bins = 0;
  double train_lr = 0.0, train_rows = 0.0, train_feats = 0.0, train_holdout = 0.2;
  bool train_block = false;
  train->add_option("--features", train_features, "Feature table CSV")->required();
  train->add_option("--labels", train_labels, "Labels CSV")->required();
  train->add_option("--mode", train_mode, "tree | bagged | boosted")->capture_default_str();
  train->add_option("--n-trees", train_trees, "Trees in the ensemble");
  train->add_option("--max-depth", train_depth, "Tree depth limit");
  train->add_option("--min-leaf", train_leaf, "Minimum samples per leaf");
  train->add_option("--learning-rate", train_lr, "Boosted shrinkage");
  train->add_option("--row-subsample", train_rows, "Row fraction per tree");
  train->add_option("--feature-subsample", train_feats, "Feature fraction per split");
  train->add_option("--histogram-bins", train_bins, "Approximate split bins (0 = exact)");
  train->add_option("--holdout", train_holdout, "Held-out fraction")->capture_default_str();
  train->add_flag("--block-split", train_block, "Hold out the trailing block, not random rows");
  train->add_option("--model-out", train_model, "Model file name")->capture_default_str();

  // predict
  auto* pred = app.add_subcommand("predict", "Predict IRI for a feature table");
  std::string pred_model, pred_features, pred_out = "predictions.csv";
  double pred_good = 95.0, pred_fair = 170.0;
  pred->add_option("--model", pred_model, "Model file")->required();
  pred->add_option("--features", pred_features, "Feature table CSV")->required();
  pred->add_option("--out", pred_out, "Predictions output")->capture_default_str();
  pred->add_option("--good-max", pred_good, "Good/Fair boundary, in/mi")->capture_default_str();
  pred->add_option("--fair-max", pred_fair, "Fair/Poor boundary, in/mi")->capture_default_str();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score predictions against labels");
  std::string eval_pred, eval_labels;
  double eval_good = 95.0, eval_fair = 170.0;
  eval->add_option("--pred", eval_pred, "Predictions CSV")->required();
  eval->add_option("--labels", eval_labels, "Labels CSV")->required();
  eval->add_option("--good-max", eval_good, "Good/Fair boundary, in/mi")->capture_default_str();
  eval->add_option("--fair-max", eval_fair, "Fair/Poor boundary, in/mi")->capture_default_str();

  // repeatability
  auto* rep = app.add_subcommand("repeatability", "Run-to-run SD/CV per segment");
  std::vector<std::string> rep_runs;
  rep->add_option("--run", rep_runs, "Predictions CSV, one per run (repeat)")
      ->required()
      ->expected(-2);

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "Stream a log end to end, emit NDJSON records");
  std::string pipe_in, pipe_model, pipe_out = "-";
  bool pipe_partial = false, pipe_stats = false;
  double pipe_good = 95.0, pipe_fair = 170.0;
  pipe->add_option("--in", pipe_in, "Canonical CSV stream")->required();
  pipe->add_option("--model", pipe_model, "Model file")->required();
  pipe->add_option("--out", pipe_out, "NDJSON output file, - for stdout")->capture_default_str();
  pipe->add_flag("--include-partial", pipe_partial, "Emit trailing/outage partial windows");
  pipe->add_flag("--stats", pipe_stats, "Append a JSON stats epilogue line");
  pipe->add_option("--good-max", pipe_good, "Good/Fair boundary, in/mi")->capture_default_str();
  pipe->add_option("--fair-max", pipe_fair, "Fair/Poor boundary, in/mi")->capture_default_str();

  // plot-data
  auto* plot = app.add_subcommand("plot-data", "Emit chart-ready data series");
  std::string plot_chart, plot_pred, plot_labels, plot_out = "plot.csv";
  std::vector<std::string> plot_runs;
  plot->add_option("--chart", plot_chart, "scatter | line | pie | repeatability")->required();
  plot->add_option("--pred", plot_pred, "Predictions CSV");
  plot->add_option("--labels", plot_labels, "Labels CSV");
  plot->add_option("--run", plot_runs, "Predictions CSV per run (repeatability)");
  plot->add_option("--out", plot_out, "Output CSV")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      return cmd_simulate(g, sim_class, sim_gd, sim_route, sim_speeds, sim_stretches, sim_noise,
                          sim_fs, sim_gps, sim_wander, sim_run, sim_prefix, sim_profile);
    }
    if (ing->parsed()) return cmd_ingest(g, ing_in, ing_out);
    if (feat->parsed()) return cmd_features(g, feat_in, feat_out);
    if (train->parsed()) {
      return cmd_train(g, train_features, train_labels, train_mode, train_trees, train_depth,
                       train_leaf, train_lr, train_rows, train_feats, train_bins, train_holdout,
                       train_block, train_model);
    }
    if (pred->parsed()) {
      return cmd_predict(g, pred_model, pred_features, pred_out, pred_good, pred_fair);
    }
    if (eval->parsed()) return cmd_evaluate(g, eval_pred, eval_labels, eval_good, eval_fair);
    if (rep->parsed()) return cmd_repeatability(g, rep_runs);
    if (pipe->parsed()) {
      return cmd_pipeline(g, pipe_in, pipe_model, pipe_out, pipe_partial, pipe_stats, pipe_good,
                          pipe_fair);
    }
    if (plot->parsed()) {
      return cmd_plot_data(g, plot_chart, plot_pred, plot_labels, plot_runs, plot_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
