// thyroidiomics: thyroid scintigraphy radiomics pipeline CLI.
//
// Subcommands: phantom, extract, select, train, predict, lococv, dsc,
// roi-counts, tost, augment-preview. Structured outputs are JSON (CSV for
// wide feature tables), written atomically; directories get a run.json
// provenance record. Exit codes: 0 success, 2 usage error, 1 runtime error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "thyro/augment.hpp"
#include "thyro/feature_table.hpp"
#include "thyro/lococv.hpp"
#include "thyro/metrics.hpp"
#include "thyro/phantom.hpp"
#include "thyro/radiomics.hpp"
#include "thyro/rng.hpp"
#include "thyro/scin.hpp"
#include "thyro/seg_eval.hpp"
#include "thyro/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace thyro;

namespace {

uint64_t resolve_seed(const CLI::Option* opt, uint64_t flag_value) {
  if (opt->count() > 0) return flag_value;
  if (const char* env = std::getenv("THYROIDIOMICS_SEED")) return std::strtoull(env, nullptr, 10);
  return 0;
}

void write_run_record(const fs::path& out_dir, const std::string& command, const json& config) {
  json j{{"tool", kToolName}, {"version", kToolVersion}, {"command", command}, {"config", config}};
  atomic_write_file(out_dir / "run.json", j.dump(2) + "\n");
}

// Optional JSON config file overriding pipeline defaults (lattice,
// rfe_trainer, thresholds). Flags still win for their own parameters.
void apply_config_file(PipelineConfig& cfg, const std::string& path) {
  if (path.empty()) return;
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw SchemaError("schema error: config " + path + ": " + e.what());
  }
  if (j.contains("lattice")) {
    cfg.lattice.clear();
    for (const auto& jp : j.at("lattice")) cfg.lattice.push_back(GbdtHyperparams::from_json(jp));
  }
  if (j.contains("rfe_trainer")) cfg.rfe_trainer = GbdtHyperparams::from_json(j.at("rfe_trainer"));
  if (j.contains("k_features")) cfg.k_features = j.at("k_features").get<int>();
  if (j.contains("corr_threshold")) cfg.corr_threshold = j.at("corr_threshold").get<double>();
  if (j.contains("bin_width")) cfg.bin_width = j.at("bin_width").get<double>();
  if (j.contains("cv_folds")) cfg.cv_folds = j.at("cv_folds").get<int>();
}

std::vector<fs::path> report_files(const std::string& arg) {
  std::vector<fs::path> files;
  if (fs::is_directory(arg)) {
    for (const auto& e : fs::directory_iterator(arg)) {
      std::string name = e.path().filename().string();
      if (name.rfind("fold_center_", 0) == 0 && e.path().extension() == ".json")
        files.push_back(e.path());
    }
  } else {
    std::string rest = arg;
    size_t pos;
    while ((pos = rest.find(',')) != std::string::npos) {
      files.emplace_back(rest.substr(0, pos));
      rest.erase(0, pos + 1);
    }
    if (!rest.empty()) files.emplace_back(rest);
  }
  if (files.empty()) throw IoError("io error: no report files found in '" + arg + "'");
  std::sort(files.begin(), files.end());
  return files;
}

double metric_from_report(const MetricsReport& rep, const std::string& metric,
                          const std::string& cls, const std::string& avg) {
  if (metric == "accuracy") return rep.accuracy;
  auto pick = [&metric](const AveragedMetrics& a) {
    if (metric == "precision") return a.precision;
    if (metric == "recall") return a.recall;
    if (metric == "f1") return a.f1;
    if (metric == "roc_auc") return a.roc_auc;
    if (metric == "prc_auc") return a.prc_auc;
    throw SchemaError("schema error: unknown metric '" + metric + "'");
  };
  if (!cls.empty()) {
    auto it = rep.per_class.find(cls);
    if (it == rep.per_class.end())
      throw SchemaError("schema error: class '" + cls + "' not in report");
    const ClasswiseMetrics& m = it->second;
    if (metric == "precision") return m.precision;
    if (metric == "recall") return m.recall;
    if (metric == "f1") return m.f1;
    if (metric == "roc_auc") return m.roc_auc;
    if (metric == "prc_auc") return m.prc_auc;
    throw SchemaError("schema error: unknown metric '" + metric + "'");
  }
  if (avg == "micro") return pick(rep.micro);
  if (avg == "macro") return pick(rep.macro);
  if (avg == "weighted") return pick(rep.weighted);
  throw SchemaError("schema error: pass --class or --avg for metric '" + metric + "'");
}

std::array<int, 3> parse_per_center(const std::string& s) {
  std::array<int, 3> out{};
  if (std::sscanf(s.c_str(), "%d,%d,%d", &out[0], &out[1], &out[2]) != 3)
    throw SchemaError("schema error: --per-center expects MNG,TH,DG counts like 20,20,20");
  return out;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"thyroid scintigraphy radiomics pipeline"};
  app.require_subcommand(1);

  // ---- phantom ----
  auto* sc_phantom = app.add_subcommand("phantom", "generate a synthetic multi-center dataset");
  int ph_centers = 9;
  std::string ph_per_center = "20,20,20";
  int ph_size = 128, ph_large = 5;
  uint64_t ph_seed = 0;
  int ph_workers = default_workers();
  std::string ph_out;
  sc_phantom->add_option("--centers", ph_centers, "number of centers");
  sc_phantom->add_option("--per-center", ph_per_center, "cases per center as MNG,TH,DG");
  sc_phantom->add_option("--size", ph_size, "base image size in pixels");
  sc_phantom->add_option("--large-center", ph_large,
                         "center generated at double resolution (0 = none)");
  auto* ph_seed_opt = sc_phantom->add_option("--seed", ph_seed, "RNG seed");
  sc_phantom->add_option("--workers", ph_workers, "worker threads");
  sc_phantom->add_option("--out", ph_out, "output directory")->required();

  // ---- extract ----
  auto* sc_extract = app.add_subcommand("extract", "extract radiomics features to CSV");
  std::string ex_manifest, ex_source = "physician", ex_out;
  double ex_bin = 0.3;
  int ex_workers = default_workers();
  sc_extract->add_option("--manifest", ex_manifest, "dataset manifest JSON")->required();
  sc_extract->add_option("--mask-source", ex_source, "physician | predicted")
      ->check(CLI::IsMember({"physician", "predicted"}));
  sc_extract->add_option("--bin-width", ex_bin, "discretization bin width");
  sc_extract->add_option("--workers", ex_workers, "worker threads");
  sc_extract->add_option("--out", ex_out, "output CSV path")->required();

  // ---- select ----
  auto* sc_select = app.add_subcommand("select", "correlation filter + RFE feature selection");
  std::string se_features, se_out, se_config;
  double se_threshold = 0.95;
  int se_k = 10;
  uint64_t se_seed = 0;
  sc_select->add_option("--features", se_features, "feature CSV")->required();
  sc_select->add_option("--threshold", se_threshold, "absolute Spearman threshold");
  sc_select->add_option("--k", se_k, "features to keep");
  auto* se_seed_opt = sc_select->add_option("--seed", se_seed, "RNG seed");
  sc_select->add_option("--config", se_config, "JSON config override");
  sc_select->add_option("--out", se_out, "selection JSON path")->required();

  // ---- train ----
  auto* sc_train = app.add_subcommand("train", "train the boosted-tree classifier");
  std::string tr_features, tr_out, tr_config;
  bool tr_grid = false;
  GbdtHyperparams tr_hp;
  int tr_folds = 5;
  uint64_t tr_seed = 0;
  sc_train->add_option("--features", tr_features, "feature CSV")->required();
  sc_train->add_flag("--grid-search", tr_grid, "grid search over the lattice");
  sc_train->add_option("--rounds", tr_hp.n_rounds, "boosting rounds");
  sc_train->add_option("--depth", tr_hp.max_depth, "max tree depth");
  sc_train->add_option("--lr", tr_hp.learning_rate, "learning rate");
  sc_train->add_option("--l2", tr_hp.l2_reg, "L2 leaf regularization");
  sc_train->add_option("--gamma", tr_hp.min_split_gain, "minimum split gain");
  sc_train->add_option("--folds", tr_folds, "CV folds for grid search");
  auto* tr_seed_opt = sc_train->add_option("--seed", tr_seed, "RNG seed");
  sc_train->add_option("--config", tr_config, "JSON config override");
  sc_train->add_option("--out", tr_out, "model JSON path")->required();

  // ---- predict ----
  auto* sc_predict = app.add_subcommand("predict", "score a feature CSV with a trained model");
  std::string pr_model, pr_features, pr_out;
  sc_predict->add_option("--model", pr_model, "model JSON")->required();
  sc_predict->add_option("--features", pr_features, "feature CSV")->required();
  sc_predict->add_option("--out", pr_out, "predictions CSV path")->required();

  // ---- lococv ----
  auto* sc_lococv = app.add_subcommand("lococv", "leave-one-center-out evaluation");
  std::string lo_manifest, lo_out, lo_config;
  int lo_scenario = 1;
  uint64_t lo_seed = 0;
  int lo_workers = default_workers();
  sc_lococv->add_option("--manifest", lo_manifest, "dataset manifest JSON")->required();
  sc_lococv->add_option("--scenario", lo_scenario, "1 = physician masks, 2 = predicted masks")
      ->check(CLI::IsMember({1, 2}));
  auto* lo_seed_opt = sc_lococv->add_option("--seed", lo_seed, "RNG seed");
  sc_lococv->add_option("--workers", lo_workers, "worker threads");
  sc_lococv->add_option("--config", lo_config, "JSON config override");
  sc_lococv->add_option("--out", lo_out, "output directory")->required();

  // ---- dsc ----
  auto* sc_dsc = app.add_subcommand("dsc", "Dice similarity coefficient of two masks");
  std::string dsc_pred, dsc_gt;
  sc_dsc->add_option("--pred", dsc_pred, "predicted mask SCIN header")->required();
  sc_dsc->add_option("--gt", dsc_gt, "ground-truth mask SCIN header")->required();

  // ---- roi-counts ----
  auto* sc_counts = app.add_subcommand("roi-counts", "per-case counts inside the physician mask");
  std::string rc_manifest, rc_out;
  sc_counts->add_option("--manifest", rc_manifest, "dataset manifest JSON")->required();
  sc_counts->add_option("--out", rc_out, "output CSV (default stdout)");

  // ---- tost ----
  auto* sc_tost = app.add_subcommand("tost", "paired equivalence test between two report sets");
  std::string to_a, to_b, to_metric = "f1", to_class, to_avg;
  double to_margin = 0.05, to_alpha = 0.05;
  sc_tost->add_option("--a", to_a, "report dir or comma-separated fold JSONs")->required();
  sc_tost->add_option("--b", to_b, "report dir or comma-separated fold JSONs")->required();
  sc_tost->add_option("--metric", to_metric, "precision|recall|f1|roc_auc|prc_auc|accuracy");
  sc_tost->add_option("--class", to_class, "pathology class (MNG|TH|DG)");
  sc_tost->add_option("--avg", to_avg, "averaging mode (micro|macro|weighted)");
  sc_tost->add_option("--margin", to_margin, "equivalence margin delta");
  sc_tost->add_option("--alpha", to_alpha, "significance level");

  // ---- augment-preview ----
  auto* sc_aug = app.add_subcommand("augment-preview", "write augmented patches as SCIN files");
  std::string au_image, au_mask, au_out;
  int au_draws = 4;
  AugmentConfig au_cfg;
  uint64_t au_seed = 0;
  sc_aug->add_option("--image", au_image, "image SCIN header")->required();
  sc_aug->add_option("--mask", au_mask, "mask SCIN header")->required();
  sc_aug->add_option("--draws", au_draws, "number of augmented patches");
  sc_aug->add_option("--patch-size", au_cfg.patch_size, "patch size in pixels");
  sc_aug->add_option("--fg-prob", au_cfg.fg_center_prob, "foreground-centered probability");
  auto* au_seed_opt = sc_aug->add_option("--seed", au_seed, "RNG seed");
  sc_aug->add_option("--out", au_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints contextual help, exit 0
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  if (sc_phantom->parsed()) {
    PhantomSpec spec;
    spec.centers = ph_centers;
    spec.per_center = parse_per_center(ph_per_center);
    spec.image_size = ph_size;
    spec.large_center = ph_large;
    spec.seed = resolve_seed(ph_seed_opt, ph_seed);
    spec.workers = ph_workers;
    generate_dataset(spec, ph_out);
    write_run_record(ph_out, "phantom",
                     json{{"centers", spec.centers},
                          {"per_center", spec.per_center},
                          {"size", spec.image_size},
                          {"large_center", spec.large_center},
                          {"seed", spec.seed}});
    std::cout << "wrote " << (fs::path(ph_out) / "manifest.json").string() << "\n";
    return 0;
  }

  if (sc_extract->parsed()) {
    DatasetManifest manifest = load_manifest(ex_manifest);
    ExtractionOutcome outcome = extract_features(manifest, ex_source, ex_bin, ex_workers);
    for (const auto& f : outcome.failed)
      std::cerr << "warning: case " << f.case_id << " failed: " << f.reason << "\n";
    write_feature_csv(ex_out, outcome.table);
    std::cout << "wrote " << ex_out << " (" << outcome.table.n_rows() << " cases, "
              << outcome.failed.size() << " failed)\n";
    return 0;
  }

  if (sc_select->parsed()) {
    PipelineConfig cfg;
    apply_config_file(cfg, se_config);
    FeatureTable table = read_feature_csv(se_features);
    TableZscoreResult scaled = table_zscore(table, table);
    CorrelationFilterResult filter = correlation_filter(scaled.train, se_threshold);
    GbdtHyperparams rfe_hp = cfg.rfe_trainer;
    rfe_hp.seed = resolve_seed(se_seed_opt, se_seed);
    RfeResult rfe = rfe_select(scaled.train.select_columns(filter.kept), se_k, rfe_hp);
    json out{{"kept", rfe.selected},
             {"importances", rfe.importances},
             {"dropped_by_correlation", filter.dropped},
             {"constant_columns", scaled.constant_columns},
             {"threshold", se_threshold},
             {"k", se_k}};
    atomic_write_file(se_out, out.dump(2) + "\n");
    std::cout << "wrote " << se_out << "\n";
    return 0;
  }

  if (sc_train->parsed()) {
    PipelineConfig cfg;
    apply_config_file(cfg, tr_config);
    FeatureTable table = read_feature_csv(tr_features);
    uint64_t seed = resolve_seed(tr_seed_opt, tr_seed);
    GbdtHyperparams hp = tr_hp;
    if (tr_grid)
      hp = grid_search_cv(table.rows, table.labels, table.columns, cfg.lattice, tr_folds, seed,
                          default_workers());
    hp.seed = seed;
    GbdtModel model = gbdt_train(table.rows, table.labels, table.columns, hp);
    atomic_write_file(tr_out, model.to_json().dump(2) + "\n");
    std::cout << "wrote " << tr_out << "\n";
    return 0;
  }

  if (sc_predict->parsed()) {
    GbdtModel model = GbdtModel::from_json(json::parse(read_file(pr_model)));
    FeatureTable table = read_feature_csv(pr_features);
    FeatureTable aligned = table.select_columns(model.feature_names);
    std::ostringstream out;
    out << "case_id,label,predicted";
    for (const auto& c : model.categories) out << ",prob_" << c;
    out << '\n';
    for (size_t i = 0; i < aligned.n_rows(); ++i) {
      std::vector<double> p = model.predict_proba(aligned.rows[i]);
      out << aligned.case_ids[i] << ',' << aligned.labels[i] << ','
          << model.predict_label(aligned.rows[i]);
      for (double v : p) out << ',' << format_double(v);
      out << '\n';
    }
    atomic_write_file(pr_out, out.str());
    std::cout << "wrote " << pr_out << "\n";
    return 0;
  }

  if (sc_lococv->parsed()) {
    PipelineConfig cfg;
    apply_config_file(cfg, lo_config);
    cfg.seed = resolve_seed(lo_seed_opt, lo_seed);
    cfg.workers = lo_workers;
    DatasetManifest manifest = load_manifest(lo_manifest);
    std::vector<FoldResult> results = run_scenario(manifest, lo_scenario, cfg);
    AggregateSummary summary = aggregate(results);
    write_results(lo_out, results, summary);
    write_run_record(lo_out, "lococv",
                     json{{"manifest", lo_manifest},
                          {"scenario", lo_scenario},
                          {"seed", cfg.seed},
                          {"k_features", cfg.k_features},
                          {"corr_threshold", cfg.corr_threshold},
                          {"bin_width", cfg.bin_width},
                          {"cv_folds", cfg.cv_folds},
                          {"config_file", lo_config}});
    std::cout << "wrote " << lo_out << " (" << results.size() << " folds)\n";
    return 0;
  }

  if (sc_dsc->parsed()) {
    BinaryMask pred = read_scin_mask(dsc_pred);
    BinaryMask gt = read_scin_mask(dsc_gt);
    std::cout << format_double(dsc(pred, gt)) << "\n";
    return 0;
  }

  if (sc_counts->parsed()) {
    DatasetManifest manifest = load_manifest(rc_manifest);
    std::ostringstream out;
    out << "case_id,pathology,counts\n";
    for (const auto& c : manifest.cases) {
      ImageGrid img = read_scin_image(c.image);
      BinaryMask mask = read_scin_mask(c.physician_mask);
      out << c.case_id << ',' << c.label << ',' << format_double(roi_counts(img, mask)) << '\n';
    }
    if (rc_out.empty()) {
      std::cout << out.str();
    } else {
      atomic_write_file(rc_out, out.str());
      std::cout << "wrote " << rc_out << "\n";
    }
    return 0;
  }

  if (sc_tost->parsed()) {
    if (!to_class.empty() && !to_avg.empty())
      throw SchemaError("schema error: pass only one of --class / --avg");
    auto load_values = [&](const std::string& arg) {
      std::map<int, double> by_center;
      for (const fs::path& f : report_files(arg)) {
        json j = json::parse(read_file(f));
        MetricsReport rep = MetricsReport::from_json(j.at("metrics"));
        by_center[rep.center_id] = metric_from_report(rep, to_metric, to_class, to_avg);
      }
      return by_center;
    };
    std::map<int, double> a = load_values(to_a), b = load_values(to_b);
    if (a.size() != b.size())
      throw SchemaError("schema error: report sets cover different centers");
    std::vector<double> va, vb;
    for (const auto& [center, v] : a) {
      auto it = b.find(center);
      if (it == b.end())
        throw SchemaError("schema error: center " + std::to_string(center) + " missing from --b");
      va.push_back(v);
      vb.push_back(it->second);
    }
    TostResult res = tost_paired(va, vb, to_margin, to_alpha);
    json out = res.to_json();
    out["metric"] = to_metric;
    out["class"] = to_class;
    out["avg"] = to_avg;
    out["n"] = va.size();
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  if (sc_aug->parsed()) {
    ImageGrid img = read_scin_image(au_image);
    BinaryMask mask = read_scin_mask(au_mask);
    au_cfg.seed = resolve_seed(au_seed_opt, au_seed);
    au_cfg.stream = CounterRng::hash_string(fs::path(au_image).stem().string());
    fs::create_directories(au_out);
    for (int d = 0; d < au_draws; ++d) {
      auto [pimg, pmask] = sample_patch(img, mask, au_cfg, static_cast<uint64_t>(d));
      auto [aimg, amask] = random_affine(pimg, pmask, au_cfg, static_cast<uint64_t>(d));
      char name[32];
      std::snprintf(name, sizeof(name), "patch_%03d", d);
      write_scin_image(fs::path(au_out) / (std::string(name) + ".json"), aimg, ScinDtype::F32);
      write_scin_mask(fs::path(au_out) / (std::string(name) + "_mask.json"), amask);
    }
    write_run_record(au_out, "augment-preview",
                     json{{"image", au_image},
                          {"mask", au_mask},
                          {"draws", au_draws},
                          {"patch_size", au_cfg.patch_size},
                          {"fg_prob", au_cfg.fg_center_prob},
                          {"seed", au_cfg.seed}});
    std::cout << "wrote " << au_draws << " patches to " << au_out << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const SchemaError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 1;
  }
}
