#include "roadmon/tree_ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "roadmon/errors.hpp"
#include "text_util.hpp"

namespace roadmon {

namespace {

constexpr std::string_view kMagic = "roadmon-model";
constexpr std::string_view kMagicV1 = "roadmon-model v1";

void validate_training_data(std::span<const FeatureRow> X, std::span<const double> y,
                            int min_samples_leaf) {
  if (X.size() != y.size()) throw LengthMismatch("feature/label row counts differ");
  if (X.size() < 2 * static_cast<std::size_t>(min_samples_leaf)) {
    throw DegenerateData("need at least 2*min_samples_leaf training rows");
  }
  for (const auto& row : X) {
    for (double v : row) {
      if (!std::isfinite(v)) throw DegenerateData("non-finite feature value");
    }
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw DegenerateData("non-finite label value");
  }
}

// Row order must not influence the fit: all scanning and sampling happens in
// this canonical (value-lexicographic) order.
std::vector<std::uint32_t> canonical_order(std::span<const FeatureRow> X,
                                           std::span<const double> y) {
  std::vector<std::uint32_t> order(X.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      if (X[a][f] != X[b][f]) return X[a][f] < X[b][f];
    }
    return y[a] < y[b];
  });
  return order;
}

struct SplitCandidate {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = -1.0;  // sum_l^2/n_l + sum_r^2/n_r
};

class TreeBuilder {
 public:
  TreeBuilder(std::span<const FeatureRow> X, std::span<const double> y, const FitConfig& cfg,
              Rng& rng)
      : x_(X), y_(y), cfg_(cfg), rng_(rng) {
    if (cfg_.histogram_bins > 0) prepare_edges_ = true;
  }

  // rows: row ids in canonical order (duplicates allowed for bootstrap)
  RegressionTree build(std::vector<std::uint32_t> rows) {
    if (prepare_edges_) build_histogram_edges(rows);
    tree_.nodes.clear();
    build_node(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  std::size_t feature_count_per_split() const {
    const double frac = std::clamp(cfg_.feature_subsample, 0.0, 1.0);
    const auto k = static_cast<std::size_t>(std::llround(frac * kNumFeatures));
    return std::clamp<std::size_t>(k, 1, kNumFeatures);
  }

  std::array<std::size_t, kNumFeatures> sampled_features(std::size_t k) {
    std::array<std::size_t, kNumFeatures> pool{};
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    if (k < kNumFeatures) {
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + rng_.uniform_index(kNumFeatures - i);
        std::swap(pool[i], pool[j]);
      }
      std::sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return pool;
  }

  void build_histogram_edges(const std::vector<std::uint32_t>& rows) {
    const auto bins = static_cast<std::size_t>(cfg_.histogram_bins);
    std::vector<double> vals(rows.size());
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      for (std::size_t i = 0; i < rows.size(); ++i) vals[i] = x_[rows[i]][f];
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      auto& edges = edges_[f];
      edges.clear();
      if (vals.size() <= 1) continue;
      auto separating_edge = [](double lo, double hi) {
        double mid = lo + (hi - lo) / 2.0;
        return mid > lo ? mid : hi;
      };
      if (vals.size() <= bins + 1) {
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
          edges.push_back(separating_edge(vals[i], vals[i + 1]));
        }
      } else {
        for (std::size_t q = 1; q <= bins; ++q) {
          const std::size_t pos = q * (vals.size() - 1) / (bins + 1);
          const double edge = separating_edge(vals[pos], vals[pos + 1]);
          if (edges.empty() || edge > edges.back()) edges.push_back(edge);
        }
      }
    }
  }

  SplitCandidate scan_exact(const std::vector<std::uint32_t>& rows, std::size_t feature,
                            double total_sum) const {
    SplitCandidate best;
    best.feature = feature;
    std::vector<std::uint32_t> sorted = rows;
    std::stable_sort(sorted.begin(), sorted.end(), [&](std::uint32_t a, std::uint32_t b) {
      return x_[a][feature] < x_[b][feature];
    });
    const std::size_t n = sorted.size();
    const auto min_leaf = static_cast<std::size_t>(cfg_.min_samples_leaf);
    double left_sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left_sum += y_[sorted[i]];
      const double xv = x_[sorted[i]][feature];
      const double xn = x_[sorted[i + 1]][feature];
      if (xv == xn) continue;
      const std::size_t nl = i + 1;
      const std::size_t nr = n - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      const double right_sum = total_sum - left_sum;
      const double gain = left_sum * left_sum / static_cast<double>(nl) +
                          right_sum * right_sum / static_cast<double>(nr);
      if (!best.found || gain > best.gain) {
        best.found = true;
        best.gain = gain;
        // midpoint, unless rounding collapses it onto xv; x < threshold must
        // put exactly the scanned prefix on the left
        double mid = xv + (xn - xv) / 2.0;
        if (!(mid > xv)) mid = xn;
        best.threshold = mid;
      }
    }
    return best;
  }

  SplitCandidate scan_histogram(const std::vector<std::uint32_t>& rows, std::size_t feature,
                                double total_sum) const {
    SplitCandidate best;
    best.feature = feature;
    const auto& edges = edges_[feature];
    if (edges.empty()) return best;
    std::vector<double> bin_sum(edges.size() + 1, 0.0);
    std::vector<std::size_t> bin_cnt(edges.size() + 1, 0);
    for (const auto r : rows) {
      const auto b = static_cast<std::size_t>(
          std::upper_bound(edges.begin(), edges.end(), x_[r][feature]) - edges.begin());
      bin_sum[b] += y_[r];
      ++bin_cnt[b];
    }
    const auto min_leaf = static_cast<std::size_t>(cfg_.min_samples_leaf);
    double left_sum = 0.0;
    std::size_t left_cnt = 0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      left_sum += bin_sum[e];
      left_cnt += bin_cnt[e];
      const std::size_t right_cnt = rows.size() - left_cnt;
      if (left_cnt < min_leaf || right_cnt < min_leaf) continue;
      const double right_sum = total_sum - left_sum;
      const double gain = left_sum * left_sum / static_cast<double>(left_cnt) +
                          right_sum * right_sum / static_cast<double>(right_cnt);
      if (!best.found || gain > best.gain) {
        best.found = true;
        best.gain = gain;
        best.threshold = edges[e];
      }
    }
    return best;
  }

  std::int32_t make_leaf(const std::vector<std::uint32_t>& rows) {
    double sum = 0.0;
    for (const auto r : rows) sum += y_[r];
    RegressionTree::Node node;
    node.value = sum / static_cast<double>(rows.size());
    tree_.nodes.push_back(node);
    return static_cast<std::int32_t>(tree_.nodes.size() - 1);
  }

  std::int32_t build_node(std::vector<std::uint32_t> rows, int depth) {
    double sum = 0.0, y_min = y_[rows.front()], y_max = y_[rows.front()];
    for (const auto r : rows) {
      sum += y_[r];
      y_min = std::min(y_min, y_[r]);
      y_max = std::max(y_max, y_[r]);
    }
    const bool splittable = depth < cfg_.max_depth && y_min != y_max &&
                            rows.size() >= 2 * static_cast<std::size_t>(cfg_.min_samples_leaf);
    if (!splittable) return make_leaf(rows);

    const std::size_t k = feature_count_per_split();
    const auto features = sampled_features(k);
    SplitCandidate best;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t f = features[i];
      const SplitCandidate cand = cfg_.histogram_bins > 0 ? scan_histogram(rows, f, sum)
                                                          : scan_exact(rows, f, sum);
      if (cand.found && (!best.found || cand.gain > best.gain)) best = cand;
    }
    if (!best.found) return make_leaf(rows);

    std::vector<std::uint32_t> left, right;
    left.reserve(rows.size());
    right.reserve(rows.size());
    for (const auto r : rows) {
      (x_[r][best.feature] < best.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    RegressionTree::Node node;
    node.feature = static_cast<std::int32_t>(best.feature);
    node.threshold = best.threshold;
    tree_.nodes.push_back(node);
    const auto self = static_cast<std::int32_t>(tree_.nodes.size() - 1);
    const std::int32_t l = build_node(std::move(left), depth + 1);
    const std::int32_t r = build_node(std::move(right), depth + 1);
    tree_.nodes[static_cast<std::size_t>(self)].left = l;
    tree_.nodes[static_cast<std::size_t>(self)].right = r;
    return self;
  }

  std::span<const FeatureRow> x_;
  std::span<const double> y_;
  const FitConfig& cfg_;
  Rng& rng_;
  RegressionTree tree_;
  bool prepare_edges_ = false;
  std::array<std::vector<double>, kNumFeatures> edges_;
};

}  // namespace

double RegressionTree::predict(const FeatureRow& x) const {
  std::int32_t at = 0;
  while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
    const Node& n = nodes[static_cast<std::size_t>(at)];
    at = x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(at)].value;
}

FitConfig bagged_defaults() {
  FitConfig cfg;
  cfg.feature_subsample = 1.0 / 3.0;
  cfg.row_subsample = 1.0;
  cfg.bootstrap = true;
  return cfg;
}

FitConfig boosted_defaults() {
  FitConfig cfg;
  cfg.feature_subsample = 1.0;
  cfg.row_subsample = 0.8;
  cfg.bootstrap = false;
  return cfg;
}

RegressionTree fit_tree(std::span<const FeatureRow> X, std::span<const double> y,
                        const FitConfig& cfg, Rng& rng) {
  validate_training_data(X, y, cfg.min_samples_leaf);
  TreeBuilder builder(X, y, cfg, rng);
  return builder.build(canonical_order(X, y));
}

namespace {

std::array<std::string, kNumFeatures> default_feature_names() {
  std::array<std::string, kNumFeatures> names;
  for (std::size_t i = 0; i < kNumFeatures; ++i) names[i] = std::string(kFeatureNames[i]);
  return names;
}

TrainingMeta make_meta(const FitConfig& cfg, std::span<const FeatureRow> X,
                       std::span<const double> y) {
  TrainingMeta meta;
  meta.seed = cfg.seed;
  meta.n_rows = X.size();
  meta.dataset_fingerprint = dataset_fingerprint(X, y);
  meta.n_trees = cfg.n_trees;
  meta.max_depth = cfg.max_depth;
  meta.min_samples_leaf = cfg.min_samples_leaf;
  meta.feature_subsample = cfg.feature_subsample;
  meta.row_subsample = cfg.row_subsample;
  meta.histogram_bins = cfg.histogram_bins;
  return meta;
}

}  // namespace

EnsembleModel fit_bagged(std::span<const FeatureRow> X, std::span<const double> y,
                         FitConfig cfg) {
  validate_training_data(X, y, cfg.min_samples_leaf);
  if (cfg.n_trees < 1) throw DegenerateData("n_trees must be >= 1");

  const std::vector<std::uint32_t> order = canonical_order(X, y);
  const std::size_t n = X.size();
  const auto per_tree =
      std::max<std::size_t>(2 * static_cast<std::size_t>(cfg.min_samples_leaf),
                            static_cast<std::size_t>(std::llround(cfg.row_subsample *
                                                                  static_cast<double>(n))));

  EnsembleModel model;
  model.mode = EnsembleMode::bagged;
  model.learning_rate = 1.0;
  model.feature_names = default_feature_names();
  model.meta = make_meta(cfg, X, y);
  model.trees.reserve(static_cast<std::size_t>(cfg.n_trees));

  const Rng base(cfg.seed);
  for (int t = 0; t < cfg.n_trees; ++t) {
    Rng rng = base.spawn(static_cast<std::uint64_t>(t));
    std::vector<std::uint32_t> rows;
    if (cfg.bootstrap) {
      std::vector<std::uint32_t> picks(per_tree);
      for (auto& p : picks) p = static_cast<std::uint32_t>(rng.uniform_index(n));
      std::sort(picks.begin(), picks.end());  // canonical positions, ascending
      rows.reserve(per_tree);
      for (const auto p : picks) rows.push_back(order[p]);
    } else {
      rows.assign(order.begin(), order.end());
    }
    TreeBuilder builder(X, y, cfg, rng);
    model.trees.push_back(builder.build(std::move(rows)));
  }
  return model;
}

EnsembleModel fit_boosted(std::span<const FeatureRow> X, std::span<const double> y,
                          FitConfig cfg) {
  validate_training_data(X, y, cfg.min_samples_leaf);
  if (cfg.n_trees < 1) throw DegenerateData("n_trees must be >= 1");
  if (cfg.learning_rate <= 0.0 || cfg.learning_rate > 1.0) {
    throw DegenerateData("learning_rate must be in (0, 1]");
  }

  const std::vector<std::uint32_t> order = canonical_order(X, y);
  const std::size_t n = X.size();

  EnsembleModel model;
  model.mode = EnsembleMode::boosted;
  model.learning_rate = cfg.learning_rate;
  model.feature_names = default_feature_names();
  model.meta = make_meta(cfg, X, y);
  model.trees.reserve(static_cast<std::size_t>(cfg.n_trees));

  double base = 0.0;
  for (const auto i : order) base += y[i];
  base /= static_cast<double>(n);
  model.base_score = base;

  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - base;

  const auto per_tree =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(
                                  cfg.row_subsample * static_cast<double>(n))),
                              2 * static_cast<std::size_t>(cfg.min_samples_leaf), n);

  const Rng rng_base(cfg.seed);
  for (int m = 0; m < cfg.n_trees; ++m) {
    Rng rng = rng_base.spawn(static_cast<std::uint64_t>(m));
    std::vector<std::uint32_t> positions(n);
    std::iota(positions.begin(), positions.end(), 0u);
    if (per_tree < n) {
      for (std::size_t i = 0; i < per_tree; ++i) {
        const std::size_t j = i + rng.uniform_index(n - i);
        std::swap(positions[i], positions[j]);
      }
      positions.resize(per_tree);
      std::sort(positions.begin(), positions.end());
    }
    std::vector<std::uint32_t> rows;
    rows.reserve(positions.size());
    for (const auto p : positions) rows.push_back(order[p]);

    TreeBuilder builder(X, residual, cfg, rng);
    RegressionTree tree = builder.build(std::move(rows));
    for (std::size_t i = 0; i < n; ++i) {
      residual[i] -= cfg.learning_rate * tree.predict(X[i]);
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

double predict(const EnsembleModel& model, const FeatureRow& x) {
  if (model.trees.empty()) throw ModelEmpty();
  double sum = 0.0;
  for (const auto& tree : model.trees) sum += tree.predict(x);
  if (model.mode == EnsembleMode::bagged) {
    return sum / static_cast<double>(model.trees.size());
  }
  return model.base_score + model.learning_rate * sum;
}

std::vector<double> predict(const EnsembleModel& model, std::span<const FeatureRow> X) {
  std::vector<double> out(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) out[i] = predict(model, X[i]);
  return out;
}

std::string dataset_fingerprint(std::span<const FeatureRow> X, std::span<const double> y) {
  // hashed in canonical row order so the fingerprint identifies the dataset
  // as a multiset, independent of input row order
  const std::vector<std::uint32_t> order = canonical_order(X, y);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(bits));
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffULL;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto i : order) {
    for (double v : X[i]) mix(v);
    mix(y[i]);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

namespace {

void write_node(std::ostream& out, const RegressionTree& tree, std::int32_t at) {
  const auto& n = tree.nodes[static_cast<std::size_t>(at)];
  if (n.feature < 0) {
    out << "(= " << detail::format_double(n.value) << ')';
    return;
  }
  out << '(' << n.feature << ' ' << detail::format_double(n.threshold) << ' ';
  write_node(out, tree, n.left);
  out << ' ';
  write_node(out, tree, n.right);
  out << ')';
}

struct NodeParser {
  std::string_view text;
  std::size_t pos = 0;

  void expect(char c) {
    if (pos >= text.size() || text[pos] != c) throw CorruptModel("malformed tree expression");
    ++pos;
  }
  void skip_spaces() {
    while (pos < text.size() && text[pos] == ' ') ++pos;
  }
  std::string_view token() {
    skip_spaces();
    const std::size_t start = pos;
    while (pos < text.size() && text[pos] != ' ' && text[pos] != '(' && text[pos] != ')') ++pos;
    if (pos == start) throw CorruptModel("malformed tree expression");
    return text.substr(start, pos - start);
  }

  std::int32_t parse(RegressionTree& tree) {
    skip_spaces();
    expect('(');
    skip_spaces();
    if (pos < text.size() && text[pos] == '=') {
      ++pos;
      const auto v = detail::parse_double(token());
      if (!v) throw CorruptModel("bad leaf value");
      skip_spaces();
      expect(')');
      RegressionTree::Node node;
      node.value = *v;
      tree.nodes.push_back(node);
      return static_cast<std::int32_t>(tree.nodes.size() - 1);
    }
    const auto f = detail::parse_u64(token());
    if (!f || *f >= kNumFeatures) throw CorruptModel("bad split feature index");
    const auto thr = detail::parse_double(token());
    if (!thr) throw CorruptModel("bad split threshold");
    RegressionTree::Node node;
    node.feature = static_cast<std::int32_t>(*f);
    node.threshold = *thr;
    tree.nodes.push_back(node);
    const auto self = static_cast<std::int32_t>(tree.nodes.size() - 1);
    const std::int32_t l = parse(tree);
    const std::int32_t r = parse(tree);
    skip_spaces();
    expect(')');
    tree.nodes[static_cast<std::size_t>(self)].left = l;
    tree.nodes[static_cast<std::size_t>(self)].right = r;
    return self;
  }
};

std::string require_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw CorruptModel(std::string("unexpected end of file: ") + what);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string expect_key(const std::string& line, const std::string& key) {
  if (line.rfind(key + ' ', 0) != 0) throw CorruptModel("expected '" + key + "' line");
  return line.substr(key.size() + 1);
}

}  // namespace

void save_model(std::ostream& out, const EnsembleModel& model) {
  out << kMagicV1 << '\n';
  out << "mode " << (model.mode == EnsembleMode::bagged ? "bagged" : "boosted") << '\n';
  out << "learning_rate " << detail::format_double(model.learning_rate) << '\n';
  out << "base_score " << detail::format_double(model.base_score) << '\n';
  out << "features";
  for (const auto& name : model.feature_names) out << ' ' << name;
  out << '\n';
  out << "meta seed " << model.meta.seed << " rows " << model.meta.n_rows << " fingerprint "
      << model.meta.dataset_fingerprint << " n_trees " << model.meta.n_trees << " max_depth "
      << model.meta.max_depth << " min_samples_leaf " << model.meta.min_samples_leaf
      << " feature_subsample " << detail::format_double(model.meta.feature_subsample)
      << " row_subsample " << detail::format_double(model.meta.row_subsample)
      << " histogram_bins " << model.meta.histogram_bins << '\n';
  out << "trees " << model.trees.size() << '\n';
  for (const auto& tree : model.trees) {
    write_node(out, tree, 0);
    out << '\n';
  }
  out << "end\n";
}

EnsembleModel load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw CorruptModel("empty model file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMagicV1) {
    if (line.rfind(kMagic, 0) == 0) {
      throw SchemaVersionMismatch("unsupported model version: " + line);
    }
    throw CorruptModel("not a roadmon model file");
  }

  EnsembleModel model;
  const std::string mode = expect_key(require_line(in, "mode"), "mode");
  if (mode == "bagged") {
    model.mode = EnsembleMode::bagged;
  } else if (mode == "boosted") {
    model.mode = EnsembleMode::boosted;
  } else {
    throw CorruptModel("unknown mode '" + mode + "'");
  }

  auto lr = detail::parse_double(expect_key(require_line(in, "learning_rate"), "learning_rate"));
  if (!lr) throw CorruptModel("bad learning_rate");
  model.learning_rate = *lr;
  auto bs = detail::parse_double(expect_key(require_line(in, "base_score"), "base_score"));
  if (!bs) throw CorruptModel("bad base_score");
  model.base_score = *bs;

  {
    std::istringstream names(expect_key(require_line(in, "features"), "features"));
    for (auto& slot : model.feature_names) {
      if (!(names >> slot)) throw CorruptModel("bad features line");
    }
  }

  {
    std::istringstream meta(expect_key(require_line(in, "meta"), "meta"));
    std::string key;
    while (meta >> key) {
      std::string value;
      if (!(meta >> value)) throw CorruptModel("dangling meta key '" + key + "'");
      if (key == "seed") {
        auto v = detail::parse_u64(value);
        if (!v) throw CorruptModel("bad meta seed");
        model.meta.seed = *v;
      } else if (key == "rows") {
        auto v = detail::parse_u64(value);
        if (!v) throw CorruptModel("bad meta rows");
        model.meta.n_rows = static_cast<std::size_t>(*v);
      } else if (key == "fingerprint") {
        model.meta.dataset_fingerprint = value;
      } else if (key == "n_trees" || key == "max_depth" || key == "min_samples_leaf" ||
                 key == "histogram_bins") {
        auto v = detail::parse_u64(value);
        if (!v) throw CorruptModel("bad meta value for '" + key + "'");
        const int iv = static_cast<int>(*v);
        if (key == "n_trees") model.meta.n_trees = iv;
        if (key == "max_depth") model.meta.max_depth = iv;
        if (key == "min_samples_leaf") model.meta.min_samples_leaf = iv;
        if (key == "histogram_bins") model.meta.histogram_bins = iv;
      } else if (key == "feature_subsample" || key == "row_subsample") {
        auto v = detail::parse_double(value);
        if (!v) throw CorruptModel("bad meta value for '" + key + "'");
        if (key == "feature_subsample") model.meta.feature_subsample = *v;
        if (key == "row_subsample") model.meta.row_subsample = *v;
      }
    }
  }

  const auto count = detail::parse_u64(expect_key(require_line(in, "trees"), "trees"));
  if (!count) throw CorruptModel("bad tree count");
  model.trees.reserve(static_cast<std::size_t>(*count));
  for (std::uint64_t t = 0; t < *count; ++t) {
    const std::string expr = require_line(in, "tree expression");
    RegressionTree tree;
    NodeParser parser{expr};
    parser.parse(tree);
    parser.skip_spaces();
    if (parser.pos != expr.size()) throw CorruptModel("trailing bytes after tree expression");
    model.trees.push_back(std::move(tree));
  }
  if (require_line(in, "end marker") != "end") throw CorruptModel("missing end marker");
  return model;
}

}  // namespace roadmon
