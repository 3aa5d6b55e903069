#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "thyro/phantom.hpp"
#include "thyro/radiomics.hpp"
#include "thyro/rng.hpp"
#include "thyro/scin.hpp"
#include "thyro/seg_eval.hpp"
#include "thyro/util.hpp"

using namespace thyro;
namespace fs = std::filesystem;

namespace {

PhantomSpec small_spec(uint64_t seed = 11, int workers = 1) {
  PhantomSpec spec;
  spec.centers = 3;
  spec.per_center = {5, 5, 5};
  spec.image_size = 64;
  spec.large_center = 2;
  spec.seed = seed;
  spec.workers = workers;
  return spec;
}

PipelineConfig fast_config(uint64_t seed = 7) {
  PipelineConfig cfg;
  cfg.seed = seed;
  GbdtHyperparams hp;
  hp.n_rounds = 60;
  hp.max_depth = 2;
  hp.learning_rate = 0.3;
  cfg.lattice = {hp};
  cfg.rfe_trainer.n_rounds = 30;
  return cfg;
}

std::string slurp_tree(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) {
    all += fs::relative(f, root).generic_string();
    all += '\0';
    all += read_file(f);
    all += '\0';
  }
  return all;
}

// 8-connected components of a mask.
int component_count(const BinaryMask& m) {
  std::vector<char> seen(m.values.size(), 0);
  int comps = 0;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      if (!m.at(x, y) || seen[static_cast<size_t>(y) * m.width + x]) continue;
      ++comps;
      stack.assign(1, {x, y});
      seen[static_cast<size_t>(y) * m.width + x] = 1;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || nx >= m.width || ny < 0 || ny >= m.height) continue;
            size_t idx = static_cast<size_t>(ny) * m.width + nx;
            if (m.values[idx] && !seen[idx]) {
              seen[idx] = 1;
              stack.emplace_back(nx, ny);
            }
          }
      }
    }
  }
  return comps;
}

}  // namespace

TEST_CASE("phantom generation: manifest structure and determinism") {
  fs::path dir_a = fs::temp_directory_path() / "thyro_phantom_a";
  fs::path dir_b = fs::temp_directory_path() / "thyro_phantom_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  DatasetManifest a = generate_dataset(small_spec(11, 1), dir_a);
  DatasetManifest b = generate_dataset(small_spec(11, 3), dir_b);

  CHECK(a.cases.size() == 45);
  std::map<std::pair<int, std::string>, int> counts;
  std::set<std::string> ids;
  for (const auto& c : a.cases) {
    counts[{c.center_id, c.label}] += 1;
    ids.insert(c.case_id);
  }
  CHECK(ids.size() == 45);
  for (int center = 1; center <= 3; ++center)
    for (const auto& label : kPathologyLabels) CHECK(counts[{center, label}] == 5);

  // Byte-identical trees regardless of worker count.
  CHECK(slurp_tree(dir_a) == slurp_tree(dir_b));

  // The large center doubles resolution over the same physical extent.
  for (const auto& c : a.cases) {
    ImageGrid img = read_scin_image(c.image);
    if (c.center_id == 2) {
      CHECK(img.width == 128);
      CHECK(img.spacing_x == 0.5);
    } else {
      CHECK(img.width == 64);
      CHECK(img.spacing_x == 1.0);
    }
  }

  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("phantom masks: nonempty, two lobes, perturbed DSC range") {
  fs::path dir = fs::temp_directory_path() / "thyro_phantom_masks";
  fs::remove_all(dir);
  DatasetManifest m = generate_dataset(small_spec(23), dir);

  int in_range = 0;
  for (const auto& c : m.cases) {
    BinaryMask gt = read_scin_mask(c.physician_mask);
    BinaryMask pred = read_scin_mask(*c.predicted_mask);
    CHECK(gt.count() > 0);
    CHECK(pred.count() > 0);
    int comps = component_count(gt);
    CHECK(comps >= 1);
    CHECK(comps <= 2);  // two lobes, possibly touching
    double d = dsc(gt, pred);
    if (d >= 0.7 && d <= 0.95) ++in_range;
  }
  CHECK(static_cast<double>(in_range) >= 0.95 * static_cast<double>(m.cases.size()));

  // Expected count ordering TH < MNG < DG.
  std::map<std::string, std::vector<double>> counts;
  for (const auto& c : m.cases) {
    ImageGrid img = read_scin_image(c.image);
    BinaryMask gt = read_scin_mask(c.physician_mask);
    counts[c.label].push_back(roi_counts(img, gt));
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  CHECK(mean(counts["TH"]) < mean(counts["MNG"]));
  CHECK(mean(counts["MNG"]) < mean(counts["DG"]));

  fs::remove_all(dir);
}

TEST_CASE("manifest loading and lococv splitting") {
  fs::path dir = fs::temp_directory_path() / "thyro_manifest";
  fs::remove_all(dir);
  DatasetManifest m = generate_dataset(small_spec(31), dir);

  DatasetManifest loaded = load_manifest(dir / "manifest.json");
  CHECK(loaded.cases.size() == m.cases.size());
  CHECK(loaded.center_ids() == std::vector<int>{1, 2, 3});

  std::vector<LococvFold> folds = split_lococv(loaded);
  CHECK(folds.size() == 3);
  std::set<size_t> all_test;
  for (const auto& f : folds) {
    CHECK(f.train_indices.size() + f.test_indices.size() == loaded.cases.size());
    for (size_t i : f.test_indices) {
      CHECK(loaded.cases[i].center_id == f.held_out_center);
      CHECK(all_test.insert(i).second);  // pairwise disjoint
    }
  }
  CHECK(all_test.size() == loaded.cases.size());  // union covers everything

  // A single-center manifest cannot be split.
  DatasetManifest single = loaded;
  std::erase_if(single.cases, [](const ManifestCase& c) { return c.center_id != 1; });
  CHECK_THROWS_AS(split_lococv(single), InvalidRangeError);

  // Schema violations are rejected.
  fs::path bad = dir / "bad_manifest.json";
  atomic_write_file(bad, R"({"cases": [{"case_id": "x"}]})");
  CHECK_THROWS_AS(load_manifest(bad), SchemaError);
  atomic_write_file(bad, R"({"cases": [{"case_id": "x", "center_id": 1, "label": "MNG",
    "image": "missing.json", "physician_mask": "missing.json"}]})");
  CHECK_THROWS_AS(load_manifest(bad), SchemaError);

  fs::remove_all(dir);
}

TEST_CASE("run_scenario: structure, determinism, and train-only dependence") {
  fs::path dir = fs::temp_directory_path() / "thyro_scenario";
  fs::remove_all(dir);
  DatasetManifest m = generate_dataset(small_spec(47), dir);
  PipelineConfig cfg = fast_config();

  std::vector<FoldResult> r1 = run_scenario(m, 1, cfg);
  CHECK(r1.size() == 3);
  for (const auto& fr : r1) {
    CHECK(fr.n_test == 15);
    CHECK(fr.selected_features.size() == 10);
    CHECK(fr.predictions.size() == 15);
    for (const auto& p : fr.predictions) {
      double sum = 0;
      for (double v : p.probs) sum += v;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  // Determinism across runs and worker counts.
  std::vector<FoldResult> r1b = run_scenario(m, 1, cfg);
  PipelineConfig cfg4 = cfg;
  cfg4.workers = 4;
  std::vector<FoldResult> r1c = run_scenario(m, 1, cfg4);
  for (size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].to_json().dump() == r1b[i].to_json().dump());
    CHECK(r1[i].to_json().dump() == r1c[i].to_json().dump());
  }

  // Training artifacts are functions of the training split only: corrupting
  // the held-out center's images must not change selection or hyperparams.
  fs::path dir2 = fs::temp_directory_path() / "thyro_scenario_mut";
  fs::remove_all(dir2);
  fs::copy(dir, dir2, fs::copy_options::recursive);
  DatasetManifest m2 = load_manifest(dir2 / "manifest.json");
  for (const auto& c : m2.cases) {
    if (c.center_id != r1[2].held_out_center) continue;
    ImageGrid img = read_scin_image(c.image);
    for (double& v : img.pixels) v = std::floor(v * 0.5);
    write_scin_image(c.image, img, ScinDtype::U16);
  }
  std::vector<FoldResult> r2 = run_scenario(m2, 1, cfg);
  const FoldResult& fold_orig = r1[2];
  const FoldResult& fold_mut = r2[2];
  CHECK(fold_orig.selected_features == fold_mut.selected_features);
  CHECK(fold_orig.dropped_by_correlation == fold_mut.dropped_by_correlation);
  CHECK(fold_orig.hyperparams.to_json().dump() == fold_mut.hyperparams.to_json().dump());
  CHECK(fold_orig.model.to_json().dump() == fold_mut.model.to_json().dump());

  // Scenario 2 demands predicted masks everywhere.
  DatasetManifest no_pred = m;
  for (auto& c : no_pred.cases) c.predicted_mask.reset();
  CHECK_THROWS_AS(run_scenario(no_pred, 2, cfg), SchemaError);
  CHECK_THROWS_AS(run_scenario(m, 3, cfg), InvalidRangeError);

  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("aggregate: mean/sd across folds and permutation invariance") {
  fs::path dir = fs::temp_directory_path() / "thyro_aggregate";
  fs::remove_all(dir);
  DatasetManifest m = generate_dataset(small_spec(61), dir);
  std::vector<FoldResult> results = run_scenario(m, 1, fast_config());

  AggregateSummary s = aggregate(results);
  CHECK(s.n_folds == 3);

  // Hand-check one metric.
  std::vector<double> acc;
  for (const auto& fr : results) acc.push_back(fr.metrics.accuracy);
  double mean = (acc[0] + acc[1] + acc[2]) / 3.0;
  double ss = 0;
  for (double v : acc) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / 2.0);
  CHECK(s.metrics.at("accuracy").first == doctest::Approx(mean).epsilon(1e-12));
  CHECK(s.metrics.at("accuracy").second == doctest::Approx(sd).epsilon(1e-12));

  // Single fold: sd 0 by convention.
  AggregateSummary one = aggregate({results[0]});
  CHECK(one.metrics.at("accuracy").second == 0.0);

  // Fold order does not matter.
  std::vector<FoldResult> reversed = {results[2], results[1], results[0]};
  AggregateSummary s2 = aggregate(reversed);
  CHECK(s2.to_json().dump() == s.to_json().dump());

  // Selection report counts live in [0, folds].
  for (const auto& [name, e] : s.selection.entries) {
    CHECK(e.first >= 1);
    CHECK(e.first <= 3);
    CHECK(e.second >= 0.0);
  }

  fs::remove_all(dir);
}

TEST_CASE("fold seeds and test sets depend only on the held-out center") {
  fs::path dir = fs::temp_directory_path() / "thyro_foldseed";
  fs::remove_all(dir);
  PhantomSpec spec = small_spec(71);
  spec.centers = 4;
  DatasetManifest m4 = generate_dataset(spec, dir);

  DatasetManifest m3 = m4;
  std::erase_if(m3.cases, [](const ManifestCase& c) { return c.center_id == 4; });

  std::vector<LococvFold> f4 = split_lococv(m4);
  std::vector<LococvFold> f3 = split_lococv(m3);
  for (size_t i = 0; i < f3.size(); ++i) {
    CHECK(f3[i].held_out_center == f4[i].held_out_center);
    // Same test cases per shared center regardless of the extra center.
    std::vector<std::string> ids3, ids4;
    for (size_t idx : f3[i].test_indices) ids3.push_back(m3.cases[idx].case_id);
    for (size_t idx : f4[i].test_indices) ids4.push_back(m4.cases[idx].case_id);
    CHECK(ids3 == ids4);
  }
  // Seed derivation hashes the center id, not the center list.
  CHECK(CounterRng::hash_combine(7, 2) == CounterRng::hash_combine(7, 2));

  fs::remove_all(dir);
}
