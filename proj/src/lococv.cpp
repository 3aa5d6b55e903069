#include "thyro/lococv.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "thyro/radiomics.hpp"
#include "thyro/rng.hpp"
#include "thyro/scin.hpp"
#include "thyro/util.hpp"

namespace thyro {

using nlohmann::json;

std::vector<int> DatasetManifest::center_ids() const {
  std::set<int> ids;
  for (const auto& c : cases) ids.insert(c.center_id);
  return {ids.begin(), ids.end()};
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw SchemaError("schema error: " + path.string() + ": " + e.what());
  }
  DatasetManifest m;
  m.root = path.parent_path();
  if (!j.contains("cases") || !j.at("cases").is_array())
    throw SchemaError("schema error: manifest must contain a 'cases' array");

  std::set<std::string> seen;
  for (const auto& jc : j.at("cases")) {
    ManifestCase c;
    try {
      c.case_id = jc.at("case_id").get<std::string>();
      c.center_id = jc.at("center_id").get<int>();
      c.label = jc.at("label").get<std::string>();
      c.image = m.root / jc.at("image").get<std::string>();
      c.physician_mask = m.root / jc.at("physician_mask").get<std::string>();
      if (jc.contains("predicted_mask") && !jc.at("predicted_mask").is_null())
        c.predicted_mask = m.root / jc.at("predicted_mask").get<std::string>();
    } catch (const json::exception& e) {
      throw SchemaError("schema error: manifest case: " + std::string(e.what()));
    }
    if (!seen.insert(c.case_id).second)
      throw SchemaError("schema error: duplicate case_id '" + c.case_id + "'");
    if (std::find(kPathologyLabels.begin(), kPathologyLabels.end(), c.label) ==
        kPathologyLabels.end())
      throw SchemaError("schema error: unknown label '" + c.label + "'");
    if (c.center_id < 1) throw SchemaError("schema error: center_id must be >= 1");
    if (!fs::exists(c.image))
      throw SchemaError("schema error: missing image file " + c.image.string());
    if (!fs::exists(c.physician_mask))
      throw SchemaError("schema error: missing mask file " + c.physician_mask.string());
    if (c.predicted_mask && !fs::exists(*c.predicted_mask))
      throw SchemaError("schema error: missing mask file " + c.predicted_mask->string());
    m.cases.push_back(std::move(c));
  }
  return m;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  namespace fs = std::filesystem;
  fs::path root = path.parent_path();
  json cases = json::array();
  for (const auto& c : manifest.cases) {
    json jc{{"case_id", c.case_id},
            {"center_id", c.center_id},
            {"label", c.label},
            {"image", fs::relative(c.image, root).generic_string()},
            {"physician_mask", fs::relative(c.physician_mask, root).generic_string()}};
    if (c.predicted_mask)
      jc["predicted_mask"] = fs::relative(*c.predicted_mask, root).generic_string();
    cases.push_back(std::move(jc));
  }
  atomic_write_file(path, json{{"cases", cases}}.dump(2) + "\n");
}

std::vector<LococvFold> split_lococv(const DatasetManifest& manifest) {
  std::vector<int> ids = manifest.center_ids();
  if (ids.size() < 2) throw InvalidRangeError("lococv: need at least 2 centers");
  std::vector<LococvFold> folds;
  for (int held_out : ids) {
    LococvFold f;
    f.held_out_center = held_out;
    for (size_t i = 0; i < manifest.cases.size(); ++i)
      (manifest.cases[i].center_id == held_out ? f.test_indices : f.train_indices).push_back(i);
    folds.push_back(std::move(f));
  }
  return folds;
}

PipelineConfig::PipelineConfig() {
  rfe_trainer.n_rounds = 40;
  rfe_trainer.max_depth = 3;
  rfe_trainer.learning_rate = 0.1;
  rfe_trainer.l2_reg = 1.0;
  rfe_trainer.min_split_gain = 0.0;
  lattice = default_lattice();
}

ExtractionOutcome extract_features(const DatasetManifest& manifest, const std::string& mask_source,
                                   double bin_width, int workers) {
  if (mask_source != "physician" && mask_source != "predicted")
    throw InvalidRangeError("extract: mask source must be physician or predicted");

  const size_t n = manifest.cases.size();
  std::vector<std::vector<double>> values(n);
  std::vector<std::string> failures(n);

  parallel_for(n, workers, [&](size_t i) {
    const ManifestCase& c = manifest.cases[i];
    try {
      std::filesystem::path mask_path;
      if (mask_source == "physician") {
        mask_path = c.physician_mask;
      } else {
        if (!c.predicted_mask) throw SchemaError("no predicted mask for case " + c.case_id);
        mask_path = *c.predicted_mask;
      }
      ImageGrid img = read_scin_image(c.image);
      BinaryMask mask = read_scin_mask(mask_path);
      auto [pimg, pmask] = preprocess_for_extraction(img, mask);
      ExtractionConfig cfg;
      cfg.bin_width = bin_width;
      values[i] = extract_all(pimg, pmask, cfg);
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  });

  ExtractionOutcome out;
  out.table.columns = canonical_feature_names();
  for (size_t i = 0; i < n; ++i) {
    const ManifestCase& c = manifest.cases[i];
    if (!failures[i].empty()) {
      out.failed.push_back({c.case_id, "", failures[i]});
      continue;
    }
    out.table.case_ids.push_back(c.case_id);
    out.table.centers.push_back(c.center_id);
    out.table.labels.push_back(c.label);
    out.table.rows.push_back(std::move(values[i]));
  }
  return out;
}

namespace {

// Row lookup by case id; extraction failures simply have no row.
std::map<std::string, size_t> index_by_case(const FeatureTable& t) {
  std::map<std::string, size_t> m;
  for (size_t i = 0; i < t.case_ids.size(); ++i) m[t.case_ids[i]] = i;
  return m;
}

}  // namespace

std::vector<FoldResult> run_scenario(const DatasetManifest& manifest, int scenario,
                                     const PipelineConfig& config) {
  if (scenario != 1 && scenario != 2)
    throw InvalidRangeError("run_scenario: scenario must be 1 or 2");
  if (scenario == 2)
    for (const auto& c : manifest.cases)
      if (!c.predicted_mask)
        throw SchemaError("schema error: scenario 2 requires predicted masks for all cases");

  ExtractionOutcome phys =
      extract_features(manifest, "physician", config.bin_width, config.workers);
  ExtractionOutcome pred;
  if (scenario == 2) pred = extract_features(manifest, "predicted", config.bin_width, config.workers);

  auto phys_index = index_by_case(phys.table);
  auto pred_index = index_by_case(pred.table);

  std::set<std::string> label_set;
  for (const auto& c : manifest.cases) label_set.insert(c.label);
  std::vector<std::string> categories(label_set.begin(), label_set.end());

  std::vector<FoldResult> results;
  for (const LococvFold& fold : split_lococv(manifest)) {
    uint64_t fold_seed =
        CounterRng::hash_combine(config.seed, static_cast<uint64_t>(fold.held_out_center));
    FoldResult fr;
    fr.held_out_center = fold.held_out_center;
    fr.categories = categories;

    // Training rows always come from physician-mask features.
    std::vector<size_t> train_rows;
    for (size_t mi : fold.train_indices) {
      const auto& c = manifest.cases[mi];
      auto it = phys_index.find(c.case_id);
      if (it == phys_index.end()) {
        fr.excluded.push_back({c.case_id, "train", "extraction failed"});
        continue;
      }
      train_rows.push_back(it->second);
    }
    const ExtractionOutcome& test_source = scenario == 2 ? pred : phys;
    const auto& test_index = scenario == 2 ? pred_index : phys_index;
    std::vector<size_t> test_rows;
    for (size_t mi : fold.test_indices) {
      const auto& c = manifest.cases[mi];
      auto it = test_index.find(c.case_id);
      if (it == test_index.end()) {
        fr.excluded.push_back({c.case_id, "test", "extraction failed"});
        continue;
      }
      test_rows.push_back(it->second);
    }
    FeatureTable train = phys.table.select_rows(train_rows);
    FeatureTable test = test_source.table.select_rows(test_rows);
    fr.n_train = static_cast<int>(train.n_rows());
    fr.n_test = static_cast<int>(test.n_rows());
    if (train.rows.empty() || test.rows.empty())
      throw DegenerateError("lococv: fold " + std::to_string(fold.held_out_center) +
                            " has an empty train or test split");

    TableZscoreResult scaled = table_zscore(train, test);
    fr.constant_columns = scaled.constant_columns;

    CorrelationFilterResult filter = correlation_filter(scaled.train, config.corr_threshold);
    fr.dropped_by_correlation = filter.dropped;
    FeatureTable train_f = scaled.train.select_columns(filter.kept);

    GbdtHyperparams rfe_hp = config.rfe_trainer;
    rfe_hp.seed = fold_seed;
    RfeResult rfe = rfe_select(train_f, config.k_features, rfe_hp);
    fr.selected_features = rfe.selected;
    fr.selected_importances = rfe.importances;

    FeatureTable train_sel = scaled.train.select_columns(rfe.selected);
    FeatureTable test_sel = scaled.applied.select_columns(rfe.selected);

    fr.hyperparams = grid_search_cv(train_sel.rows, train_sel.labels, rfe.selected, config.lattice,
                                    config.cv_folds, fold_seed, config.workers);
    fr.model = gbdt_train(train_sel.rows, train_sel.labels, rfe.selected, fr.hyperparams);

    std::vector<std::string> y_true = test_sel.labels;
    std::vector<std::string> y_pred;
    std::vector<std::vector<double>> probs;
    for (size_t i = 0; i < test_sel.rows.size(); ++i) {
      std::vector<double> p = fr.model.predict_proba(test_sel.rows[i]);
      // Model categories may be a subset ordering; map onto report categories.
      std::vector<double> row(categories.size(), 0.0);
      for (size_t k = 0; k < fr.model.categories.size(); ++k) {
        auto it = std::find(categories.begin(), categories.end(), fr.model.categories[k]);
        if (it != categories.end()) row[it - categories.begin()] = p[k];
      }
      probs.push_back(row);
      size_t best = 0;
      for (size_t k = 1; k < row.size(); ++k)
        if (row[k] > row[best]) best = k;
      y_pred.push_back(categories[best]);
      fr.predictions.push_back({test_sel.case_ids[i], y_true[i], y_pred.back(), row});
    }
    fr.metrics = build_metrics_report(fold.held_out_center, y_true, y_pred, probs, categories);
    results.push_back(std::move(fr));
  }
  return results;
}

json FoldResult::to_json() const {
  json preds = json::array();
  for (const auto& p : predictions) {
    json probs;
    for (size_t k = 0; k < categories.size(); ++k) probs[categories[k]] = p.probs[k];
    preds.push_back(json{{"case_id", p.case_id},
                         {"label", p.label},
                         {"predicted", p.predicted},
                         {"probs", probs}});
  }
  json excl = json::array();
  for (const auto& e : excluded)
    excl.push_back(json{{"case_id", e.case_id}, {"stage", e.stage}, {"reason", e.reason}});
  return json{{"held_out_center", held_out_center},
              {"n_train", n_train},
              {"n_test", n_test},
              {"dropped_by_correlation", dropped_by_correlation},
              {"constant_columns", constant_columns},
              {"selected_features", selected_features},
              {"selected_importances", selected_importances},
              {"hyperparams", hyperparams.to_json()},
              {"excluded_cases", excl},
              {"metrics", metrics.to_json()},
              {"predictions", preds}};
}

namespace {

void add_metric(std::map<std::string, std::vector<double>>& acc, const std::string& name,
                double v) {
  acc[name].push_back(v);
}

void collect_metrics(std::map<std::string, std::vector<double>>& acc, const FoldResult& fr) {
  const MetricsReport& m = fr.metrics;
  add_metric(acc, "accuracy", m.accuracy);
  auto add_avg = [&acc](const std::string& prefix, const AveragedMetrics& a) {
    add_metric(acc, prefix + "_precision", a.precision);
    add_metric(acc, prefix + "_recall", a.recall);
    add_metric(acc, prefix + "_f1", a.f1);
    add_metric(acc, prefix + "_roc_auc", a.roc_auc);
    add_metric(acc, prefix + "_prc_auc", a.prc_auc);
  };
  add_avg("micro", m.micro);
  add_avg("macro", m.macro);
  add_avg("weighted", m.weighted);
  for (const auto& [cat, cm] : m.per_class) {
    add_metric(acc, "class_" + cat + "_precision", cm.precision);
    add_metric(acc, "class_" + cat + "_recall", cm.recall);
    add_metric(acc, "class_" + cat + "_f1", cm.f1);
    if (cm.roc_defined) add_metric(acc, "class_" + cat + "_roc_auc", cm.roc_auc);
    if (cm.prc_defined) add_metric(acc, "class_" + cat + "_prc_auc", cm.prc_auc);
  }
}

}  // namespace

AggregateSummary aggregate(const std::vector<FoldResult>& results) {
  if (results.empty()) throw InvalidRangeError("aggregate: need at least one fold");
  AggregateSummary s;
  s.n_folds = static_cast<int>(results.size());

  std::map<std::string, std::vector<double>> acc;
  std::vector<std::map<std::string, double>> per_fold_importances;
  for (const FoldResult& fr : results) {
    collect_metrics(acc, fr);
    s.excluded_total += static_cast<int>(fr.excluded.size());
    per_fold_importances.push_back(fr.selected_importances);
  }
  for (const auto& [name, vals] : acc) {
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double sd = 0.0;
    if (vals.size() > 1) {
      double ss = 0.0;
      for (double v : vals) ss += (v - mean) * (v - mean);
      sd = std::sqrt(ss / static_cast<double>(vals.size() - 1));
    }
    s.metrics[name] = {mean, sd};
  }
  s.selection = build_selection_report(per_fold_importances);
  return s;
}

json AggregateSummary::to_json() const {
  json jm;
  for (const auto& [name, ms] : metrics)
    jm[name] = json{{"mean", ms.first}, {"sd", ms.second}};
  return json{{"n_folds", n_folds},
              {"metrics", jm},
              {"excluded_cases_total", excluded_total}};
}

void write_results(const std::filesystem::path& out_dir, const std::vector<FoldResult>& results,
                   const AggregateSummary& summary) {
  std::filesystem::create_directories(out_dir);
  for (const FoldResult& fr : results) {
    std::filesystem::path p =
        out_dir / ("fold_center_" + std::to_string(fr.held_out_center) + ".json");
    atomic_write_file(p, fr.to_json().dump(2) + "\n");
  }
  atomic_write_file(out_dir / "summary.json", summary.to_json().dump(2) + "\n");
  atomic_write_file(out_dir / "selection_report.json", summary.selection.to_json().dump(2) + "\n");
}

}  // namespace thyro
