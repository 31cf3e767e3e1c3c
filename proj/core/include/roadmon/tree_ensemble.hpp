#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "roadmon/rng.hpp"
#include "roadmon/spectral.hpp"

namespace roadmon {

using FeatureRow = std::array<double, kNumFeatures>;

/// Binary regression tree over the 7-feature row. Rows with
/// x[feature] < threshold go left.
struct RegressionTree {
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;  // leaf prediction, in/mi

    bool operator==(const Node&) const = default;
  };
  std::vector<Node> nodes;  // nodes[0] is the root

  double predict(const FeatureRow& x) const;
  bool operator==(const RegressionTree&) const = default;
};

enum class EnsembleMode { bagged, boosted };

/// Hyperparameters for both ensemble modes. Fitting is deterministic in
/// (seed, dataset) and invariant to training-row order: rows are
/// canonicalized by value before any sampling or scanning.
struct FitConfig {
  int n_trees = 300;
  int max_depth = 6;
  int min_samples_leaf = 5;
  double feature_subsample = 1.0;  // fraction of features considered per split
  double row_subsample = 1.0;      // fraction of rows per tree
  bool bootstrap = true;           // bagged: rows drawn with replacement
  double learning_rate = 0.1;      // boosted shrinkage
  int histogram_bins = 0;          // > 0 enables approximate histogram splits
  std::uint64_t seed = 0;
};

/// Bagged forest defaults: bootstrap resampling, ~1/3 of features per split.
FitConfig bagged_defaults();
/// Boosting defaults: 0.8 row subsample without replacement, all features.
FitConfig boosted_defaults();

struct TrainingMeta {
  std::uint64_t seed = 0;
  std::size_t n_rows = 0;
  std::string dataset_fingerprint;  // FNV-1a over the raw feature/label bytes
  int n_trees = 0;
  int max_depth = 0;
  int min_samples_leaf = 0;
  double feature_subsample = 1.0;
  double row_subsample = 1.0;
  int histogram_bins = 0;

  bool operator==(const TrainingMeta&) const = default;
};

struct EnsembleModel {
  EnsembleMode mode = EnsembleMode::bagged;
  std::vector<RegressionTree> trees;
  double learning_rate = 0.1;  // ignored in bagged mode
  double base_score = 0.0;     // boosted initial prediction (label mean)
  std::array<std::string, kNumFeatures> feature_names{};
  TrainingMeta meta;

  bool operator==(const EnsembleModel&) const = default;
};

/// Single CART fit by greedy variance reduction: exhaustive threshold scan
/// over midpoints of sorted distinct values, ties broken by lowest feature
/// index then lowest threshold. Throws DegenerateData when
/// n < 2 * min_samples_leaf.
RegressionTree fit_tree(std::span<const FeatureRow> X, std::span<const double> y,
                        const FitConfig& cfg, Rng& rng);

EnsembleModel fit_bagged(std::span<const FeatureRow> X, std::span<const double> y,
                         FitConfig cfg = bagged_defaults());

EnsembleModel fit_boosted(std::span<const FeatureRow> X, std::span<const double> y,
                          FitConfig cfg = boosted_defaults());

/// Deterministic traversal. Throws ModelEmpty on an unfitted model.
double predict(const EnsembleModel& model, const FeatureRow& x);
std::vector<double> predict(const EnsembleModel& model, std::span<const FeatureRow> X);

/// Versioned line-oriented text serialization; load(save(m)) == m and
/// predictions round-trip bit-identically.
void save_model(std::ostream& out, const EnsembleModel& model);
EnsembleModel load_model(std::istream& in);

std::string dataset_fingerprint(std::span<const FeatureRow> X, std::span<const double> y);

}  // namespace roadmon
