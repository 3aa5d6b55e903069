#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "thyro/errors.hpp"

namespace thyro {

struct ConfusionMatrix {
  std::vector<std::string> categories;
  std::vector<std::vector<int>> counts;  // rows = true label, cols = predicted

  int total() const;
};

ConfusionMatrix confusion(const std::vector<std::string>& y_true,
                          const std::vector<std::string>& y_pred,
                          const std::vector<std::string>& categories);

struct ClasswiseMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double roc_auc = 0.0;
  double prc_auc = 0.0;
  int support = 0;
  bool roc_defined = true;
  bool prc_defined = true;
};

struct AveragedMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double roc_auc = 0.0;
  double prc_auc = 0.0;
};

/// Per-pathology and averaged classification metrics for one test center.
struct MetricsReport {
  int center_id = 0;
  int n_cases = 0;
  double accuracy = 0.0;
  std::map<std::string, ClasswiseMetrics> per_class;
  AveragedMetrics micro, macro, weighted;
  std::vector<std::string> flags;  // 0/0 conventions and undefined AUCs

  nlohmann::json to_json() const;
  static MetricsReport from_json(const nlohmann::json& j);
};

struct PrfResult {
  std::map<std::string, ClasswiseMetrics> per_class;  // AUC fields untouched
  AveragedMetrics micro, macro, weighted;             // AUC fields zero
  double accuracy = 0.0;
  std::vector<std::string> flags;
};

/// One-vs-rest precision/recall/F1 per category (0/0 := 0, flagged), plus
/// micro (pooled TP/FP/FN), macro (unweighted mean) and weighted
/// (support-weighted mean) averages and accuracy.
PrfResult classwise_and_averaged(const ConfusionMatrix& cm);

/// Mann-Whitney ROC AUC: (concordant + 0.5*tied) / (P*N).
/// Throws DegenerateError unless both a positive and a negative are present.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& truth);

/// Average-precision PRC AUC over descending-score thresholds, score ties
/// processed as one block. Throws DegenerateError without a positive.
double prc_auc(const std::vector<double>& scores, const std::vector<int>& truth);

enum class Curve { Roc, Prc };

struct MulticlassAucResult {
  std::map<std::string, double> per_class;  // only defined categories
  double micro = 0.0;
  double macro = 0.0;
  double weighted = 0.0;
  std::vector<std::string> undefined;       // categories excluded from macro
};

/// One-vs-rest AUCs from a probability matrix (rows sum to 1 within 1e-9).
/// Micro flattens all (case, category) indicator/probability pairs into one
/// binary problem.
MulticlassAucResult multiclass_auc(const std::vector<std::vector<double>>& probs,
                                   const std::vector<std::string>& truth,
                                   const std::vector<std::string>& categories, Curve curve);

/// Full per-center report from labels, predictions and probabilities.
MetricsReport build_metrics_report(int center_id, const std::vector<std::string>& y_true,
                                   const std::vector<std::string>& y_pred,
                                   const std::vector<std::vector<double>>& probs,
                                   const std::vector<std::string>& categories);

struct TostResult {
  double mean_diff = 0.0;
  double sd_diff = 0.0;    // divisor n-1
  double margin = 0.0;     // delta
  double alpha = 0.05;
  double p_lower = 1.0;
  double p_upper = 1.0;
  double p_tost = 1.0;     // max of the two
  bool equivalent = false; // p_tost < alpha

  nlohmann::json to_json() const;
};

/// Paired two-one-sided t-test for equivalence of a and b within +/- margin.
/// Degenerate sd = 0: p_tost := 0 if |mean| < margin else 1.
TostResult tost_paired(const std::vector<double>& a, const std::vector<double>& b, double margin,
                       double alpha = 0.05);

}  // namespace thyro
