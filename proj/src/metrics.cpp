#include "thyro/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "thyro/stats.hpp"

namespace thyro {

using nlohmann::json;

int ConfusionMatrix::total() const {
  int t = 0;
  for (const auto& row : counts)
    for (int c : row) t += c;
  return t;
}

ConfusionMatrix confusion(const std::vector<std::string>& y_true,
                          const std::vector<std::string>& y_pred,
                          const std::vector<std::string>& categories) {
  if (y_true.size() != y_pred.size())
    throw ContractError("confusion: label vectors differ in length");
  ConfusionMatrix cm;
  cm.categories = categories;
  cm.counts.assign(categories.size(), std::vector<int>(categories.size(), 0));
  auto index_of = [&categories](const std::string& label) {
    auto it = std::find(categories.begin(), categories.end(), label);
    if (it == categories.end()) throw ContractError("confusion: unknown label '" + label + "'");
    return static_cast<size_t>(it - categories.begin());
  };
  for (size_t i = 0; i < y_true.size(); ++i)
    cm.counts[index_of(y_true[i])][index_of(y_pred[i])] += 1;
  return cm;
}

PrfResult classwise_and_averaged(const ConfusionMatrix& cm) {
  const size_t k = cm.categories.size();
  int total = cm.total();
  if (total <= 0) throw InvalidRangeError("classwise_and_averaged: empty confusion matrix");

  PrfResult r;
  double diag = 0.0;
  long long pooled_tp = 0, pooled_fp = 0, pooled_fn = 0;
  double macro_p = 0.0, macro_r = 0.0, macro_f = 0.0;
  double weighted_p = 0.0, weighted_r = 0.0, weighted_f = 0.0;

  for (size_t c = 0; c < k; ++c) {
    long long tp = cm.counts[c][c];
    long long fp = 0, fn = 0, support = 0;
    for (size_t o = 0; o < k; ++o) {
      if (o != c) {
        fp += cm.counts[o][c];
        fn += cm.counts[c][o];
      }
      support += cm.counts[c][o];
    }
    diag += static_cast<double>(tp);
    pooled_tp += tp;
    pooled_fp += fp;
    pooled_fn += fn;

    ClasswiseMetrics m;
    m.support = static_cast<int>(support);
    if (tp + fp == 0) {
      m.precision = 0.0;  // 0/0 convention
      r.flags.push_back("precision_zero_denominator:" + cm.categories[c]);
    } else {
      m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    if (tp + fn == 0) {
      m.recall = 0.0;
      r.flags.push_back("recall_zero_denominator:" + cm.categories[c]);
    } else {
      m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;

    macro_p += m.precision;
    macro_r += m.recall;
    macro_f += m.f1;
    weighted_p += m.precision * static_cast<double>(support);
    weighted_r += m.recall * static_cast<double>(support);
    weighted_f += m.f1 * static_cast<double>(support);
    r.per_class[cm.categories[c]] = m;
  }

  r.accuracy = diag / static_cast<double>(total);
  r.macro.precision = macro_p / static_cast<double>(k);
  r.macro.recall = macro_r / static_cast<double>(k);
  r.macro.f1 = macro_f / static_cast<double>(k);
  r.weighted.precision = weighted_p / static_cast<double>(total);
  r.weighted.recall = weighted_r / static_cast<double>(total);
  r.weighted.f1 = weighted_f / static_cast<double>(total);
  // Pooled one-vs-rest counts; for single-label problems micro precision =
  // micro recall = accuracy.
  double micro_p = pooled_tp + pooled_fp > 0
                       ? static_cast<double>(pooled_tp) / static_cast<double>(pooled_tp + pooled_fp)
                       : 0.0;
  double micro_r = pooled_tp + pooled_fn > 0
                       ? static_cast<double>(pooled_tp) / static_cast<double>(pooled_tp + pooled_fn)
                       : 0.0;
  r.micro.precision = micro_p;
  r.micro.recall = micro_r;
  r.micro.f1 = micro_p + micro_r > 0.0 ? 2.0 * micro_p * micro_r / (micro_p + micro_r) : 0.0;
  return r;
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& truth) {
  if (scores.size() != truth.size()) throw ContractError("roc_auc: length mismatch");
  size_t n = scores.size();
  size_t pos = 0;
  for (int t : truth) pos += t ? 1 : 0;
  size_t neg = n - pos;
  if (pos == 0 || neg == 0)
    throw DegenerateError("roc_auc: need both a positive and a negative");

  // Rank-sum with average ranks for ties:
  // AUC = (R_pos - P(P+1)/2) / (P*N).
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&scores](size_t a, size_t b) { return scores[a] < scores[b]; });
  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (size_t t = i; t <= j; ++t)
      if (truth[order[t]]) rank_sum_pos += avg_rank;
    i = j + 1;
  }
  double p = static_cast<double>(pos), q = static_cast<double>(neg);
  return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * q);
}

double prc_auc(const std::vector<double>& scores, const std::vector<int>& truth) {
  if (scores.size() != truth.size()) throw ContractError("prc_auc: length mismatch");
  size_t n = scores.size();
  size_t pos = 0;
  for (int t : truth) pos += t ? 1 : 0;
  if (pos == 0) throw DegenerateError("prc_auc: no positives");

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&scores](size_t a, size_t b) { return scores[a] > scores[b]; });

  // Average precision: sum (R_k - R_{k-1}) * P_k over descending thresholds,
  // groups of tied scores processed as one block.
  double ap = 0.0;
  double prev_recall = 0.0;
  size_t tp = 0, fp = 0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    for (size_t t = i; t <= j; ++t) {
      if (truth[order[t]])
        ++tp;
      else
        ++fp;
    }
    double recall = static_cast<double>(tp) / static_cast<double>(pos);
    double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j + 1;
  }
  return ap;
}

MulticlassAucResult multiclass_auc(const std::vector<std::vector<double>>& probs,
                                   const std::vector<std::string>& truth,
                                   const std::vector<std::string>& categories, Curve curve) {
  if (probs.size() != truth.size()) throw ContractError("multiclass_auc: length mismatch");
  for (const auto& row : probs) {
    if (row.size() != categories.size())
      throw ContractError("multiclass_auc: probability row width mismatch");
    double s = 0.0;
    for (double v : row) s += v;
    if (std::abs(s - 1.0) > 1e-9)
      throw ContractError("multiclass_auc: probability row does not sum to 1");
  }

  MulticlassAucResult r;
  auto auc_of = [curve](const std::vector<double>& s, const std::vector<int>& t) {
    return curve == Curve::Roc ? roc_auc(s, t) : prc_auc(s, t);
  };

  double macro_sum = 0.0, weighted_sum = 0.0;
  int macro_n = 0;
  long long weight_total = 0;
  std::vector<double> flat_scores;
  std::vector<int> flat_truth;
  flat_scores.reserve(probs.size() * categories.size());
  flat_truth.reserve(probs.size() * categories.size());

  for (size_t c = 0; c < categories.size(); ++c) {
    std::vector<double> s(probs.size());
    std::vector<int> t(probs.size());
    long long support = 0;
    for (size_t i = 0; i < probs.size(); ++i) {
      s[i] = probs[i][c];
      t[i] = truth[i] == categories[c] ? 1 : 0;
      support += t[i];
    }
    for (size_t i = 0; i < probs.size(); ++i) {
      flat_scores.push_back(s[i]);
      flat_truth.push_back(t[i]);
    }
    try {
      double v = auc_of(s, t);
      r.per_class[categories[c]] = v;
      macro_sum += v;
      ++macro_n;
      weighted_sum += v * static_cast<double>(support);
      weight_total += support;
    } catch (const DegenerateError&) {
      r.undefined.push_back(categories[c]);
    }
  }
  if (macro_n == 0) throw DegenerateError("multiclass_auc: every category undefined");
  r.macro = macro_sum / macro_n;
  r.weighted = weight_total > 0 ? weighted_sum / static_cast<double>(weight_total) : 0.0;
  r.micro = auc_of(flat_scores, flat_truth);
  return r;
}

MetricsReport build_metrics_report(int center_id, const std::vector<std::string>& y_true,
                                   const std::vector<std::string>& y_pred,
                                   const std::vector<std::vector<double>>& probs,
                                   const std::vector<std::string>& categories) {
  MetricsReport rep;
  rep.center_id = center_id;
  rep.n_cases = static_cast<int>(y_true.size());

  PrfResult prf = classwise_and_averaged(confusion(y_true, y_pred, categories));
  rep.accuracy = prf.accuracy;
  rep.per_class = prf.per_class;
  rep.micro = prf.micro;
  rep.macro = prf.macro;
  rep.weighted = prf.weighted;
  rep.flags = prf.flags;

  MulticlassAucResult roc = multiclass_auc(probs, y_true, categories, Curve::Roc);
  MulticlassAucResult prc = multiclass_auc(probs, y_true, categories, Curve::Prc);
  for (const auto& cat : categories) {
    auto& m = rep.per_class.at(cat);
    auto rit = roc.per_class.find(cat);
    if (rit != roc.per_class.end()) {
      m.roc_auc = rit->second;
    } else {
      m.roc_defined = false;
      rep.flags.push_back("roc_auc_undefined:" + cat);
    }
    auto pit = prc.per_class.find(cat);
    if (pit != prc.per_class.end()) {
      m.prc_auc = pit->second;
    } else {
      m.prc_defined = false;
      rep.flags.push_back("prc_auc_undefined:" + cat);
    }
  }
  rep.micro.roc_auc = roc.micro;
  rep.macro.roc_auc = roc.macro;
  rep.weighted.roc_auc = roc.weighted;
  rep.micro.prc_auc = prc.micro;
  rep.macro.prc_auc = prc.macro;
  rep.weighted.prc_auc = prc.weighted;
  return rep;
}

namespace {

json averaged_to_json(const AveragedMetrics& a) {
  return json{{"precision", a.precision},
              {"recall", a.recall},
              {"f1", a.f1},
              {"roc_auc", a.roc_auc},
              {"prc_auc", a.prc_auc}};
}

AveragedMetrics averaged_from_json(const json& j) {
  AveragedMetrics a;
  a.precision = j.at("precision").get<double>();
  a.recall = j.at("recall").get<double>();
  a.f1 = j.at("f1").get<double>();
  a.roc_auc = j.at("roc_auc").get<double>();
  a.prc_auc = j.at("prc_auc").get<double>();
  return a;
}

}  // namespace

json MetricsReport::to_json() const {
  json per;
  for (const auto& [cat, m] : per_class) {
    json jm{{"precision", m.precision}, {"recall", m.recall},   {"f1", m.f1},
            {"support", m.support},     {"roc_auc", nullptr},   {"prc_auc", nullptr}};
    if (m.roc_defined) jm["roc_auc"] = m.roc_auc;
    if (m.prc_defined) jm["prc_auc"] = m.prc_auc;
    per[cat] = jm;
  }
  return json{{"center_id", center_id},
              {"n_cases", n_cases},
              {"accuracy", accuracy},
              {"per_class", per},
              {"averages",
               json{{"micro", averaged_to_json(micro)},
                    {"macro", averaged_to_json(macro)},
                    {"weighted", averaged_to_json(weighted)}}},
              {"flags", flags}};
}

MetricsReport MetricsReport::from_json(const json& j) {
  MetricsReport r;
  r.center_id = j.at("center_id").get<int>();
  r.n_cases = j.at("n_cases").get<int>();
  r.accuracy = j.at("accuracy").get<double>();
  for (const auto& [cat, jm] : j.at("per_class").items()) {
    ClasswiseMetrics m;
    m.precision = jm.at("precision").get<double>();
    m.recall = jm.at("recall").get<double>();
    m.f1 = jm.at("f1").get<double>();
    m.support = jm.at("support").get<int>();
    if (jm.at("roc_auc").is_null()) {
      m.roc_defined = false;
    } else {
      m.roc_auc = jm.at("roc_auc").get<double>();
    }
    if (jm.at("prc_auc").is_null()) {
      m.prc_defined = false;
    } else {
      m.prc_auc = jm.at("prc_auc").get<double>();
    }
    r.per_class[cat] = m;
  }
  r.micro = averaged_from_json(j.at("averages").at("micro"));
  r.macro = averaged_from_json(j.at("averages").at("macro"));
  r.weighted = averaged_from_json(j.at("averages").at("weighted"));
  if (j.contains("flags")) r.flags = j.at("flags").get<std::vector<std::string>>();
  return r;
}

json TostResult::to_json() const {
  return json{{"mean_diff", mean_diff}, {"sd_diff", sd_diff},   {"margin", margin},
              {"alpha", alpha},         {"p_lower", p_lower},   {"p_upper", p_upper},
              {"p_tost", p_tost},       {"equivalent", equivalent}};
}

TostResult tost_paired(const std::vector<double>& a, const std::vector<double>& b, double margin,
                       double alpha) {
  if (a.size() != b.size()) throw ContractError("tost_paired: length mismatch");
  if (a.size() < 2) throw InvalidRangeError("tost_paired: need n >= 2 pairs");
  if (margin <= 0.0) throw InvalidRangeError("tost_paired: margin must be positive");

  size_t n = a.size();
  std::vector<double> d(n);
  for (size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  double mean = 0.0;
  for (double v : d) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / static_cast<double>(n - 1));

  TostResult r;
  r.mean_diff = mean;
  r.sd_diff = sd;
  r.margin = margin;
  r.alpha = alpha;
  if (sd == 0.0) {
    // Degenerate rule: all differences identical.
    r.p_tost = std::abs(mean) < margin ? 0.0 : 1.0;
    r.p_lower = r.p_tost;
    r.p_upper = r.p_tost;
  } else {
    double se = sd / std::sqrt(static_cast<double>(n));
    double nu = static_cast<double>(n - 1);
    double t_lower = (mean + margin) / se;  // H0: mean <= -margin
    double t_upper = (mean - margin) / se;  // H0: mean >= +margin
    r.p_lower = student_t_cdf(-t_lower, nu);
    r.p_upper = student_t_cdf(t_upper, nu);
    r.p_tost = std::max(r.p_lower, r.p_upper);
  }
  r.equivalent = r.p_tost < alpha;
  return r;
}

}  // namespace thyro
