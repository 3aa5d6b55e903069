#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "thyro/feature_table.hpp"
#include "thyro/rng.hpp"

using namespace thyro;

namespace {

FeatureTable toy_table(std::vector<std::string> columns, std::vector<std::vector<double>> rows,
                       std::vector<std::string> labels = {}) {
  FeatureTable t;
  t.columns = std::move(columns);
  t.rows = std::move(rows);
  for (size_t i = 0; i < t.rows.size(); ++i) {
    t.case_ids.push_back("case" + std::to_string(i));
    t.centers.push_back(1);
    t.labels.push_back(labels.empty() ? "MNG" : labels[i]);
  }
  return t;
}

}  // namespace

TEST_CASE("table_zscore standardizes on train statistics only") {
  FeatureTable train = toy_table({"a", "b"}, {{1, 10}, {2, 10}, {3, 10}});
  FeatureTable test = toy_table({"a", "b"}, {{2, 11}});
  TableZscoreResult r = table_zscore(train, test);

  // Column a: mean 2, population sd sqrt(2/3); test value 2 maps to 0.
  CHECK(r.applied.rows[0][0] == doctest::Approx(0.0).epsilon(1e-12));
  // Column b is constant: passed through unscaled and flagged.
  CHECK(r.constant_columns == std::vector<std::string>{"b"});
  CHECK(r.applied.rows[0][1] == 11.0);

  double mean = 0, var = 0;
  for (const auto& row : r.train.rows) mean += row[0];
  mean /= 3.0;
  for (const auto& row : r.train.rows) var += (row[0] - mean) * (row[0] - mean);
  var /= 3.0;
  CHECK(std::abs(mean) < 1e-9);
  CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);

  // Idempotence: standardizing already-standardized data changes little.
  TableZscoreResult r2 = table_zscore(r.train, r.train);
  for (size_t i = 0; i < r.train.rows.size(); ++i)
    CHECK(std::abs(r2.train.rows[i][0] - r.train.rows[i][0]) < 1e-9);
}

TEST_CASE("spearman_rho") {
  CHECK(spearman_rho({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spearman_rho({1, 2, 3, 4}, {9, 7, 5, 3}) == doctest::Approx(-1.0).epsilon(1e-12));
  // Average ranks with a tie: 4.5 / sqrt(22.5).
  CHECK(spearman_rho({1, 2, 2, 3}, {1, 2, 3, 4}) ==
        doctest::Approx(0.9486832980505138).epsilon(1e-12));
  CHECK_THROWS_AS(spearman_rho({1, 1, 1}, {1, 2, 3}), DegenerateError);
  CHECK_THROWS_AS(spearman_rho({1}, {2}), InvalidRangeError);

  // Invariance under strictly increasing transforms.
  CounterRng rng(12);
  std::vector<double> x(20), y(20);
  for (size_t i = 0; i < 20; ++i) {
    x[i] = rng.next_uniform(-5, 5);
    y[i] = rng.next_uniform(-5, 5);
  }
  double base = spearman_rho(x, y);
  std::vector<double> xt = x;
  for (double& v : xt) v = std::exp(v);
  CHECK(spearman_rho(xt, y) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("correlation_filter") {
  // Duplicated column: the canonically later copy is dropped.
  FeatureTable dup = toy_table({"a", "b"}, {{1, 1}, {2, 2}, {3, 3}, {5, 5}});
  CorrelationFilterResult r = correlation_filter(dup, 0.95);
  CHECK(r.kept == std::vector<std::string>{"a"});
  CHECK(r.dropped == std::vector<std::string>{"b"});

  // Weakly correlated data survives whole.
  FeatureTable ok = toy_table({"a", "b"}, {{1, 5}, {2, -3}, {3, 4}, {4, -1}, {5, 2}});
  CHECK(correlation_filter(ok, 0.95).kept.size() == 2);

  // Three mutual duplicates: only the first survives the greedy scan.
  FeatureTable tri = toy_table({"a", "b", "c"}, {{1, 1, 1}, {2, 2, 2}, {4, 4, 4}, {9, 9, 9}});
  CHECK(correlation_filter(tri, 0.95).kept == std::vector<std::string>{"a"});

  // Row order cannot change the outcome.
  CounterRng rng(3);
  FeatureTable big = toy_table({"a", "b", "c", "d"}, {});
  for (int i = 0; i < 30; ++i) {
    double v = rng.next_uniform(0, 1);
    big.rows.push_back({v, v * 2 + 1e-3 * rng.next_double(), rng.next_double(),
                        rng.next_double()});
    big.case_ids.push_back("r" + std::to_string(i));
    big.centers.push_back(1);
    big.labels.push_back("TH");
  }
  auto base = correlation_filter(big, 0.95);
  std::vector<size_t> perm(big.n_rows());
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = perm.size() - 1 - i;
  auto shuffled = correlation_filter(big.select_rows(perm), 0.95);
  CHECK(base.kept == shuffled.kept);

  CHECK_THROWS_AS(correlation_filter(dup, 0.0), InvalidRangeError);
}

TEST_CASE("rfe_select finds the informative columns") {
  // 12 columns, 2 deterministic label definers, 10 pure noise.
  CounterRng rng(77);
  std::vector<std::string> cols;
  for (int i = 0; i < 12; ++i) cols.push_back("f" + std::to_string(i));
  FeatureTable t;
  t.columns = cols;
  for (int i = 0; i < 150; ++i) {
    std::vector<double> row(12);
    for (int c = 0; c < 12; ++c) row[c] = rng.next_uniform(0, 1);
    std::string label = row[3] < 0.4 ? "TH" : (row[7] < 0.5 ? "MNG" : "DG");
    t.rows.push_back(row);
    t.labels.push_back(label);
    t.case_ids.push_back("c" + std::to_string(i));
    t.centers.push_back(1);
  }

  GbdtHyperparams hp;
  hp.n_rounds = 40;
  hp.max_depth = 3;
  hp.learning_rate = 0.1;

  RfeResult keep10 = rfe_select(t, 10, hp);
  CHECK(keep10.selected.size() == 10);
  CHECK(std::find(keep10.selected.begin(), keep10.selected.end(), "f3") != keep10.selected.end());
  CHECK(std::find(keep10.selected.begin(), keep10.selected.end(), "f7") != keep10.selected.end());

  RfeResult keep2 = rfe_select(t, 2, hp);
  CHECK(keep2.selected == std::vector<std::string>{"f3", "f7"});

  // Identity when k equals the column count; determinism across calls.
  RfeResult all = rfe_select(t, 12, hp);
  CHECK(all.selected == cols);
  RfeResult again = rfe_select(t, 2, hp);
  CHECK(again.selected == keep2.selected);
  CHECK(again.importances == keep2.importances);

  CHECK_THROWS_AS(rfe_select(t, 13, hp), InvalidRangeError);
  CHECK_THROWS_AS(rfe_select(t, 0, hp), InvalidRangeError);
}

TEST_CASE("build_selection_report") {
  std::vector<std::map<std::string, double>> folds = {
      {{"a", 0.2}, {"b", 0.5}},
      {{"a", 0.3}},
  };
  SelectionReport rep = build_selection_report(folds);
  CHECK(rep.entries.at("a").first == 2);
  CHECK(rep.entries.at("a").second == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(rep.entries.at("b").first == 1);
  CHECK(rep.entries.count("c") == 0);

  nlohmann::json j = rep.to_json();
  CHECK(j.is_array());
  CHECK(j[0].at("feature") == "a");  // higher count first
}

TEST_CASE("feature csv round trip") {
  namespace fs = std::filesystem;
  FeatureTable t = toy_table({"x", "y"}, {{1.5, -2.25e-7}, {3.0, 0.1}}, {"MNG", "DG"});
  fs::path p = fs::temp_directory_path() / "thyro_feat_test.csv";
  write_feature_csv(p, t);
  FeatureTable back = read_feature_csv(p);
  CHECK(back.columns == t.columns);
  CHECK(back.rows == t.rows);  // 17 significant digits round-trip exactly
  CHECK(back.labels == t.labels);
  fs::remove(p);
}
