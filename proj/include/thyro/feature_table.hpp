#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "thyro/gbdt.hpp"

namespace thyro {

/// Tabular feature data: one row per case, one column per feature, plus the
/// pathology label and acquisition center per row.
struct FeatureTable {
  std::vector<std::string> case_ids;
  std::vector<int> centers;
  std::vector<std::string> labels;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  size_t n_rows() const { return rows.size(); }
  size_t n_cols() const { return columns.size(); }
  int column_index(const std::string& name) const;  // -1 if absent
  FeatureTable select_columns(const std::vector<std::string>& names) const;
  FeatureTable select_rows(const std::vector<size_t>& indices) const;
};

void validate(const FeatureTable& t);

/// CSV with columns case_id,center_id,label,<features...>; values carry
/// 17 significant digits.
void write_feature_csv(const std::filesystem::path& path, const FeatureTable& t);
FeatureTable read_feature_csv(const std::filesystem::path& path);

struct TableZscoreResult {
  FeatureTable train;
  FeatureTable applied;
  std::vector<std::string> constant_columns;  // passed through unscaled
};

/// Column-wise standardization with mean/sd (population) estimated on the
/// training table only, applied to both tables.
TableZscoreResult table_zscore(const FeatureTable& train, const FeatureTable& apply_to);

/// Spearman rank correlation: Pearson correlation of average-ranked data.
/// Throws DegenerateError when either input is constant.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

struct CorrelationFilterResult {
  std::vector<std::string> kept;     // canonical order survivors
  std::vector<std::string> dropped;
};

/// Scan ordered column pairs (i, j), i < j; when |rho| > threshold and j is
/// not yet dropped, drop j. Pairs involving a constant column are skipped
/// (their rank correlation is undefined).
CorrelationFilterResult correlation_filter(const FeatureTable& table, double threshold);

struct RfeResult {
  std::vector<std::string> selected;              // canonical order
  std::map<std::string, double> importances;      // normalized, final model
};

/// Recursive feature elimination: repeatedly fit the boosted-tree classifier
/// and drop the single column with minimum total-gain importance (ties drop
/// the canonically later name) until k columns remain.
RfeResult rfe_select(const FeatureTable& table, int k, const GbdtHyperparams& trainer_config);

struct SelectionReport {
  // feature -> (number of folds that selected it, mean importance among those)
  std::map<std::string, std::pair<int, double>> entries;

  nlohmann::json to_json() const;  // sorted by count desc, importance desc, name
};

SelectionReport build_selection_report(
    const std::vector<std::map<std::string, double>>& per_fold_importances);

}  // namespace thyro
