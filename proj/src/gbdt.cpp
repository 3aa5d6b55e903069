#include "thyro/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "thyro/rng.hpp"
#include "thyro/util.hpp"

namespace thyro {

using nlohmann::json;

json GbdtHyperparams::to_json() const {
  return json{{"n_rounds", n_rounds},       {"max_depth", max_depth},
              {"learning_rate", learning_rate}, {"l2_reg", l2_reg},
              {"min_split_gain", min_split_gain}, {"seed", seed}};
}

GbdtHyperparams GbdtHyperparams::from_json(const json& j) {
  GbdtHyperparams hp;
  hp.n_rounds = j.at("n_rounds").get<int>();
  hp.max_depth = j.at("max_depth").get<int>();
  hp.learning_rate = j.at("learning_rate").get<double>();
  hp.l2_reg = j.at("l2_reg").get<double>();
  hp.min_split_gain = j.at("min_split_gain").get<double>();
  hp.seed = j.at("seed").get<uint64_t>();
  return hp;
}

double Tree::predict(const std::vector<double>& row) const {
  int idx = 0;
  while (!nodes[idx].is_leaf())
    idx = row[nodes[idx].feature] < nodes[idx].threshold ? nodes[idx].left : nodes[idx].right;
  return nodes[idx].leaf_value;
}

namespace {

void validate_hp(const GbdtHyperparams& hp) {
  if (hp.n_rounds < 1) throw InvalidRangeError("gbdt: n_rounds must be >= 1");
  if (hp.max_depth < 1) throw InvalidRangeError("gbdt: max_depth must be >= 1");
  if (!(hp.learning_rate > 0.0 && hp.learning_rate <= 1.0))
    throw InvalidRangeError("gbdt: learning_rate must be in (0, 1]");
  if (hp.l2_reg < 0.0 || hp.min_split_gain < 0.0)
    throw InvalidRangeError("gbdt: regularization must be nonnegative");
}

struct SplitChoice {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

// Per-node split gain with L2 regularization:
//   0.5 * (GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l))
inline double split_gain(double gl, double hl, double gr, double hr, double l2) {
  double dl = hl + l2, dr = hr + l2, dp = hl + hr + l2;
  if (dl <= 0.0 || dr <= 0.0 || dp <= 0.0) return -1.0;
  return 0.5 * (gl * gl / dl + gr * gr / dr - (gl + gr) * (gl + gr) / dp);
}

/// One regression tree on (g, h), grown level-wise to max_depth with exact
/// greedy splits over pre-sorted feature orders. Ties keep the lowest
/// feature index, then the lowest threshold (features scanned in ascending
/// index order, thresholds in ascending value order, with strictly-greater
/// gain required to replace the incumbent).
Tree fit_tree(const std::vector<std::vector<double>>& X,
              const std::vector<std::vector<uint32_t>>& sorted_by_feature,
              const std::vector<double>& g, const std::vector<double>& h,
              const GbdtHyperparams& hp, std::vector<int>& node_of) {
  const size_t n = X.size();
  const size_t n_feat = sorted_by_feature.size();

  Tree tree;
  tree.nodes.push_back(TreeNode{});
  std::vector<double> node_g(1, 0.0), node_h(1, 0.0);
  for (size_t i = 0; i < n; ++i) {
    node_g[0] += g[i];
    node_h[0] += h[i];
  }
  node_of.assign(n, 0);
  std::vector<int> active{0};

  for (int depth = 0; depth < hp.max_depth && !active.empty(); ++depth) {
    std::vector<int> slot_of_node(tree.nodes.size(), -1);
    for (size_t s = 0; s < active.size(); ++s) slot_of_node[active[s]] = static_cast<int>(s);

    std::vector<SplitChoice> best(active.size());
    std::vector<double> run_g(active.size()), run_h(active.size()), last_val(active.size());
    std::vector<char> started(active.size());

    for (size_t f = 0; f < n_feat; ++f) {
      std::fill(run_g.begin(), run_g.end(), 0.0);
      std::fill(run_h.begin(), run_h.end(), 0.0);
      std::fill(started.begin(), started.end(), 0);
      for (uint32_t idx : sorted_by_feature[f]) {
        int nd = node_of[idx];
        int s = slot_of_node[nd];
        if (s < 0) continue;
        double v = X[idx][f];
        if (started[s] && v > last_val[s]) {
          double gl = run_g[s], hl = run_h[s];
          double gain = split_gain(gl, hl, node_g[nd] - gl, node_h[nd] - hl, hp.l2_reg);
          if (gain > best[s].gain) {
            best[s].gain = gain;
            best[s].feature = static_cast<int>(f);
            best[s].threshold = 0.5 * (last_val[s] + v);
          }
        }
        run_g[s] += g[idx];
        run_h[s] += h[idx];
        last_val[s] = v;
        started[s] = 1;
      }
    }

    std::vector<int> next_active;
    for (size_t s = 0; s < active.size(); ++s) {
      int nd = active[s];
      if (best[s].feature < 0 || !(best[s].gain > hp.min_split_gain)) continue;
      int left = static_cast<int>(tree.nodes.size());
      int right = left + 1;
      tree.nodes[nd].feature = best[s].feature;
      tree.nodes[nd].threshold = best[s].threshold;
      tree.nodes[nd].left = left;
      tree.nodes[nd].right = right;
      tree.nodes[nd].leaf_value = best[s].gain;  // temporarily holds gain for importance
      tree.nodes.push_back(TreeNode{});
      tree.nodes.push_back(TreeNode{});
      node_g.resize(tree.nodes.size(), 0.0);
      node_h.resize(tree.nodes.size(), 0.0);
      next_active.push_back(left);
      next_active.push_back(right);
    }
    if (next_active.empty()) break;
    for (size_t i = 0; i < n; ++i) {
      int nd = node_of[i];
      if (tree.nodes[nd].is_leaf()) continue;
      int child = X[i][tree.nodes[nd].feature] < tree.nodes[nd].threshold ? tree.nodes[nd].left
                                                                          : tree.nodes[nd].right;
      node_of[i] = child;
      node_g[child] += g[i];
      node_h[child] += h[i];
    }
    active = std::move(next_active);
  }

  for (size_t nd = 0; nd < tree.nodes.size(); ++nd) {
    if (!tree.nodes[nd].is_leaf()) continue;
    double denom = node_h[nd] + hp.l2_reg;
    tree.nodes[nd].leaf_value =
        denom > 0.0 ? -hp.learning_rate * node_g[nd] / denom : 0.0;
  }
  return tree;
}

// Internal nodes keep their split gain in leaf_value during construction;
// move it to a dedicated field for serialization clarity.
double node_gain(const TreeNode& n) { return n.is_leaf() ? 0.0 : n.leaf_value; }

void softmax_inplace(std::vector<double>& v) {
  double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : v) x /= sum;
}

}  // namespace

std::vector<double> GbdtModel::predict_raw(const std::vector<double>& row) const {
  if (row.size() != feature_names.size())
    throw ContractError("gbdt: feature row width does not match the trained model");
  std::vector<double> raw(categories.size(), base_score);
  for (const auto& round : rounds)
    for (size_t k = 0; k < round.size(); ++k) raw[k] += round[k].predict(row);
  return raw;
}

std::vector<double> GbdtModel::predict_proba(const std::vector<double>& row) const {
  std::vector<double> raw = predict_raw(row);
  softmax_inplace(raw);
  return raw;
}

std::string GbdtModel::predict_label(const std::vector<double>& row) const {
  std::vector<double> p = predict_proba(row);
  size_t best = 0;
  for (size_t k = 1; k < p.size(); ++k)
    if (p[k] > p[best]) best = k;
  return categories[best];
}

std::map<std::string, double> GbdtModel::feature_importance(bool normalized) const {
  std::map<std::string, double> imp;
  for (const auto& name : feature_names) imp[name] = 0.0;
  double total = 0.0;
  for (const auto& round : rounds) {
    for (const Tree& tree : round) {
      for (const TreeNode& n : tree.nodes) {
        if (n.is_leaf()) continue;
        imp[feature_names[n.feature]] += node_gain(n);
        total += node_gain(n);
      }
    }
  }
  if (normalized && total > 0.0)
    for (auto& [_, v] : imp) v /= total;
  return imp;
}

GbdtModel gbdt_train(const std::vector<std::vector<double>>& X, const std::vector<std::string>& y,
                     const std::vector<std::string>& feature_names, const GbdtHyperparams& hp) {
  validate_hp(hp);
  if (X.size() != y.size()) throw ContractError("gbdt: X and y differ in length");
  if (X.empty()) throw DegenerateError("gbdt: empty training set");
  const size_t n = X.size();
  const size_t n_feat = feature_names.size();
  for (const auto& row : X) {
    if (row.size() != n_feat) throw ContractError("gbdt: inconsistent row width");
    for (double v : row)
      if (!std::isfinite(v)) throw ContractError("gbdt: non-finite feature value");
  }

  std::set<std::string> distinct(y.begin(), y.end());
  if (distinct.size() < 2) throw DegenerateError("gbdt: need at least 2 distinct labels");
  GbdtModel model;
  model.categories.assign(distinct.begin(), distinct.end());
  model.feature_names = feature_names;
  model.hp = hp;
  const size_t k = model.categories.size();

  std::vector<int> y_idx(n);
  for (size_t i = 0; i < n; ++i) {
    auto it = std::lower_bound(model.categories.begin(), model.categories.end(), y[i]);
    y_idx[i] = static_cast<int>(it - model.categories.begin());
  }

  // Feature orders are fixed for the whole fit.
  std::vector<std::vector<uint32_t>> sorted_by_feature(n_feat);
  for (size_t f = 0; f < n_feat; ++f) {
    auto& ord = sorted_by_feature[f];
    ord.resize(n);
    std::iota(ord.begin(), ord.end(), 0u);
    std::sort(ord.begin(), ord.end(), [&X, f](uint32_t a, uint32_t b) {
      return X[a][f] != X[b][f] ? X[a][f] < X[b][f] : a < b;
    });
  }

  std::vector<std::vector<double>> margins(n, std::vector<double>(k, model.base_score));
  std::vector<double> g(n), h(n);
  std::vector<int> node_of;

  for (int round = 0; round < hp.n_rounds; ++round) {
    std::vector<std::vector<double>> probs = margins;
    for (auto& row : probs) softmax_inplace(row);

    std::vector<Tree> round_trees;
    round_trees.reserve(k);
    for (size_t c = 0; c < k; ++c) {
      for (size_t i = 0; i < n; ++i) {
        double p = probs[i][c];
        g[i] = p - (y_idx[i] == static_cast<int>(c) ? 1.0 : 0.0);
        h[i] = p * (1.0 - p);
      }
      Tree tree = fit_tree(X, sorted_by_feature, g, h, hp, node_of);
      for (size_t i = 0; i < n; ++i) margins[i][c] += tree.nodes[node_of[i]].leaf_value;
      round_trees.push_back(std::move(tree));
    }
    model.rounds.push_back(std::move(round_trees));

    double loss = 0.0;
    for (size_t i = 0; i < n; ++i) {
      std::vector<double> p = margins[i];
      softmax_inplace(p);
      loss -= std::log(std::max(p[y_idx[i]], 1e-300));
    }
    model.train_loss.push_back(loss / static_cast<double>(n));
  }
  return model;
}

namespace {

json tree_node_to_json(const Tree& t, int idx) {
  const TreeNode& n = t.nodes[idx];
  if (n.is_leaf()) return json{{"leaf", n.leaf_value}};
  return json{{"feature", n.feature},
              {"threshold", n.threshold},
              {"gain", node_gain(n)},
              {"left", tree_node_to_json(t, n.left)},
              {"right", tree_node_to_json(t, n.right)}};
}

int tree_node_from_json(const json& j, Tree& t) {
  int idx = static_cast<int>(t.nodes.size());
  t.nodes.push_back(TreeNode{});
  if (j.contains("leaf")) {
    t.nodes[idx].leaf_value = j.at("leaf").get<double>();
    return idx;
  }
  t.nodes[idx].feature = j.at("feature").get<int>();
  t.nodes[idx].threshold = j.at("threshold").get<double>();
  t.nodes[idx].leaf_value = j.at("gain").get<double>();  // internal nodes carry gain
  int left = tree_node_from_json(j.at("left"), t);
  t.nodes[idx].left = left;
  t.nodes[idx].right = tree_node_from_json(j.at("right"), t);
  return idx;
}

}  // namespace

json GbdtModel::to_json() const {
  json jr = json::array();
  for (const auto& round : rounds) {
    json jc = json::array();
    for (const Tree& t : round) jc.push_back(tree_node_to_json(t, 0));
    jr.push_back(jc);
  }
  return json{{"categories", categories},
              {"feature_names", feature_names},
              {"base_score", base_score},
              {"hyperparams", hp.to_json()},
              {"rounds", jr}};
}

GbdtModel GbdtModel::from_json(const json& j) {
  GbdtModel m;
  m.categories = j.at("categories").get<std::vector<std::string>>();
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  m.base_score = j.at("base_score").get<double>();
  m.hp = GbdtHyperparams::from_json(j.at("hyperparams"));
  for (const auto& jc : j.at("rounds")) {
    std::vector<Tree> round;
    for (const auto& jt : jc) {
      Tree t;
      tree_node_from_json(jt, t);
      round.push_back(std::move(t));
    }
    m.rounds.push_back(std::move(round));
  }
  return m;
}

std::vector<int> stratified_folds(const std::vector<std::string>& y, int folds, uint64_t seed) {
  if (folds < 2) throw InvalidRangeError("stratified_folds: need folds >= 2");
  std::set<std::string> cat_set(y.begin(), y.end());
  std::vector<std::string> cats(cat_set.begin(), cat_set.end());
  std::vector<int> assignment(y.size(), -1);
  for (size_t c = 0; c < cats.size(); ++c) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < y.size(); ++i)
      if (y[i] == cats[c]) idx.push_back(i);
    if (idx.size() < static_cast<size_t>(folds))
      throw DegenerateError("stratified_folds: category '" + cats[c] +
                            "' has fewer samples than folds");
    CounterRng rng(seed, CounterRng::hash_combine(0x666f6c64, c));  // "fold"
    for (size_t i = idx.size() - 1; i > 0; --i)
      std::swap(idx[i], idx[rng.next_below(i + 1)]);
    for (size_t pos = 0; pos < idx.size(); ++pos)
      assignment[idx[pos]] = static_cast<int>(pos % static_cast<size_t>(folds));
  }
  return assignment;
}

std::vector<GbdtHyperparams> default_lattice() {
  std::vector<GbdtHyperparams> lattice;
  for (int rounds : {50, 100, 200}) {
    for (int depth : {2, 3, 4}) {
      for (double lr : {0.05, 0.1, 0.3}) {
        GbdtHyperparams hp;
        hp.n_rounds = rounds;
        hp.max_depth = depth;
        hp.learning_rate = lr;
        hp.l2_reg = 1.0;
        hp.min_split_gain = 0.0;
        lattice.push_back(hp);
      }
    }
  }
  return lattice;
}

GbdtHyperparams grid_search_cv(const std::vector<std::vector<double>>& X,
                               const std::vector<std::string>& y,
                               const std::vector<std::string>& feature_names,
                               const std::vector<GbdtHyperparams>& lattice, int folds,
                               uint64_t seed, int workers) {
  if (lattice.empty()) throw InvalidRangeError("grid_search_cv: empty lattice");
  std::vector<int> assignment = stratified_folds(y, folds, seed);

  std::vector<double> mean_acc(lattice.size(), 0.0);
  parallel_for(lattice.size(), workers, [&](size_t point) {
    GbdtHyperparams hp = lattice[point];
    hp.seed = seed;
    double acc_sum = 0.0;
    for (int f = 0; f < folds; ++f) {
      std::vector<std::vector<double>> xt;
      std::vector<std::string> yt;
      std::vector<size_t> val;
      for (size_t i = 0; i < X.size(); ++i) {
        if (assignment[i] == f) {
          val.push_back(i);
        } else {
          xt.push_back(X[i]);
          yt.push_back(y[i]);
        }
      }
      GbdtModel m = gbdt_train(xt, yt, feature_names, hp);
      int correct = 0;
      for (size_t i : val)
        if (m.predict_label(X[i]) == y[i]) ++correct;
      acc_sum += static_cast<double>(correct) / static_cast<double>(val.size());
    }
    mean_acc[point] = acc_sum / folds;
  });

  size_t best = 0;
  for (size_t p = 1; p < lattice.size(); ++p)
    if (mean_acc[p] > mean_acc[best]) best = p;  // ties keep the first point
  GbdtHyperparams chosen = lattice[best];
  chosen.seed = seed;
  return chosen;
}

}  // namespace thyro
