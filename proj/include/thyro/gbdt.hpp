#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "thyro/errors.hpp"

namespace thyro {

struct GbdtHyperparams {
  int n_rounds = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
  double l2_reg = 1.0;          // lambda
  double min_split_gain = 0.0;  // gamma
  uint64_t seed = 0;            // used for CV fold shuffling only

  nlohmann::json to_json() const;
  static GbdtHyperparams from_json(const nlohmann::json& j);
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double leaf_value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(const std::vector<double>& row) const;
};

/// Multiclass gradient-boosted trees with a softmax cross-entropy objective.
/// One regression tree per category per round; splits are found by exact
/// greedy search over midpoints of sorted unique values with second-order
/// (gradient/hessian) gain and L2 regularization. Tie-breaking is fixed
/// (lowest feature index, then lowest threshold), so training is
/// deterministic: no row/column subsampling is performed.
struct GbdtModel {
  std::vector<std::string> categories;     // sorted unique labels
  std::vector<std::string> feature_names;
  double base_score = 0.0;
  GbdtHyperparams hp;
  std::vector<std::vector<Tree>> rounds;   // [round][category]

  // Softmax cross-entropy on the training set after each round (not serialized).
  std::vector<double> train_loss;

  std::vector<double> predict_raw(const std::vector<double>& row) const;
  std::vector<double> predict_proba(const std::vector<double>& row) const;
  std::string predict_label(const std::vector<double>& row) const;

  /// Total split gain per feature; never-split features get 0.
  std::map<std::string, double> feature_importance(bool normalized = false) const;

  nlohmann::json to_json() const;
  static GbdtModel from_json(const nlohmann::json& j);
};

GbdtModel gbdt_train(const std::vector<std::vector<double>>& X, const std::vector<std::string>& y,
                     const std::vector<std::string>& feature_names, const GbdtHyperparams& hp);

/// Stratified k-fold assignment: per category, indices are shuffled with the
/// seeded counter RNG and dealt round-robin. Throws DegenerateError when a
/// category has fewer samples than folds.
std::vector<int> stratified_folds(const std::vector<std::string>& y, int folds, uint64_t seed);

/// Default lattice: n_rounds x max_depth x learning_rate as enumerated, with
/// lambda = 1 and gamma = 0 throughout.
std::vector<GbdtHyperparams> default_lattice();

/// Mean stratified-CV accuracy per lattice point; ties keep the first point
/// in lattice order. `workers` parallelizes over lattice points with a
/// deterministic reduction.
GbdtHyperparams grid_search_cv(const std::vector<std::vector<double>>& X,
                               const std::vector<std::string>& y,
                               const std::vector<std::string>& feature_names,
                               const std::vector<GbdtHyperparams>& lattice, int folds,
                               uint64_t seed, int workers = 1);

}  // namespace thyro
