#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "thyro/feature_table.hpp"
#include "thyro/metrics.hpp"
#include "thyro/texture.hpp"

namespace thyro {

inline const std::vector<std::string> kPathologyLabels = {"MNG", "TH", "DG"};

struct ManifestCase {
  std::string case_id;
  int center_id = 0;
  std::string label;  // MNG | TH | DG
  std::filesystem::path image;
  std::filesystem::path physician_mask;
  std::optional<std::filesystem::path> predicted_mask;
};

struct DatasetManifest {
  std::filesystem::path root;  // directory of the manifest file
  std::vector<ManifestCase> cases;

  std::vector<int> center_ids() const;  // sorted unique
};

/// Load + validate: unique case ids, known labels, every referenced file
/// present on disk.
DatasetManifest load_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

struct LococvFold {
  int held_out_center = 0;
  std::vector<size_t> train_indices;
  std::vector<size_t> test_indices;
};

/// One fold per center: test = that center, train = all others.
std::vector<LococvFold> split_lococv(const DatasetManifest& manifest);

struct PipelineConfig {
  uint64_t seed = 0;
  double bin_width = 0.3;
  double corr_threshold = 0.95;
  int k_features = 10;
  int cv_folds = 5;
  GbdtHyperparams rfe_trainer;            // core model refit at every RFE round
  std::vector<GbdtHyperparams> lattice;   // grid-search lattice
  int workers = 1;

  PipelineConfig();
};

struct ExcludedCase {
  std::string case_id;
  std::string stage;  // "train" | "test"
  std::string reason;
};

struct CasePrediction {
  std::string case_id;
  std::string label;
  std::string predicted;
  std::vector<double> probs;  // aligned with categories
};

struct FoldResult {
  int held_out_center = 0;
  int n_train = 0;
  int n_test = 0;
  std::vector<std::string> categories;
  std::vector<std::string> dropped_by_correlation;
  std::vector<std::string> constant_columns;
  std::vector<std::string> selected_features;
  std::map<std::string, double> selected_importances;
  GbdtHyperparams hyperparams;
  GbdtModel model;
  std::vector<ExcludedCase> excluded;
  std::vector<CasePrediction> predictions;
  MetricsReport metrics;

  nlohmann::json to_json() const;  // model itself is not embedded
};

/// Full per-fold pipeline. Scenario 1 extracts test features from physician
/// masks; scenario 2 from predicted masks (training always uses physician
/// masks). Deterministic given config.seed; per-fold seeds are derived by
/// hashing the held-out center id so adding centers does not shift other
/// folds' randomness.
std::vector<FoldResult> run_scenario(const DatasetManifest& manifest, int scenario,
                                     const PipelineConfig& config);

struct AggregateSummary {
  int n_folds = 0;
  // metric name -> (mean, sd over folds, divisor n-1; single fold -> sd 0)
  std::map<std::string, std::pair<double, double>> metrics;
  int excluded_total = 0;
  SelectionReport selection;

  nlohmann::json to_json() const;
};

AggregateSummary aggregate(const std::vector<FoldResult>& results);

/// Extract a feature table for every case in the manifest using the given
/// mask source ("physician" | "predicted"). Failed cases are skipped and
/// reported; rows keep manifest order.
struct ExtractionOutcome {
  FeatureTable table;
  std::vector<ExcludedCase> failed;
};

ExtractionOutcome extract_features(const DatasetManifest& manifest, const std::string& mask_source,
                                   double bin_width, int workers);

/// Write fold results, summary.json and selection_report.json under out_dir.
void write_results(const std::filesystem::path& out_dir, const std::vector<FoldResult>& results,
                   const AggregateSummary& summary);

}  // namespace thyro
