#include "thyro/phantom.hpp"

#include <cmath>
#include <cstdio>

#include "thyro/rng.hpp"
#include "thyro/scin.hpp"
#include "thyro/util.hpp"

namespace thyro {

namespace {

struct Nodule {
  double cx, cy, sigma, amplitude;
};

struct CasePlan {
  std::string case_id;
  int center_id;
  std::string label;  // MNG | TH | DG
  int grid_size;
  double spacing;
  uint64_t stream;
};

// Activity scales (counts per pixel before center gain). Chosen so expected
// ROI totals order TH < MNG < DG with wide margins, and so the class texture
// survives the boundary perturbation of the predicted masks: DG is a smooth
// high-count plateau (low in-ROI variance), MNG is strongly nodular, TH is
// low-uptake and noisy.
constexpr double kBackground = 2.0;
constexpr double kActivityTh = 5.0;
constexpr double kActivityMng = 18.0;
constexpr double kActivityDg = 110.0;
constexpr double kLobeRx = 8.0;   // mm
constexpr double kLobeRy = 15.0;  // mm
constexpr double kLobeOffset = 11.0;
// Boundary flip probability tuned for DSC near 0.85 on a 1 mm grid.
constexpr double kBoundaryFlipProb = 0.8;

struct Gland {
  double lx, rx_c;  // lobe center x (left/right)
  double cy;
  double rx, ry;    // lobe radii, mm
};

bool in_gland(const Gland& g, double x, double y) {
  double dl = (x - g.lx) / g.rx, dr = (x - g.rx_c) / g.rx;
  double dyl = (y - g.cy) / g.ry;
  return dl * dl + dyl * dyl <= 1.0 || dr * dr + dyl * dyl <= 1.0;
}

BinaryMask perturb_boundary(const BinaryMask& gt, CounterRng& rng) {
  BinaryMask out = gt;
  const int w = gt.width, h = gt.height;
  auto inside = [&](int x, int y) { return x >= 0 && x < w && y >= 0 && y < h; };
  auto any4 = [&](int x, int y, uint8_t value) {
    static const int dx[4] = {1, -1, 0, 0};
    static const int dy[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k)
      if (inside(x + dx[k], y + dy[k]) && gt.at(x + dx[k], y + dy[k]) == value) return true;
    return false;
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (gt.at(x, y)) {
        if (any4(x, y, 0) && rng.next_double() < kBoundaryFlipProb) out.at(x, y) = 0;  // erode
      } else {
        if (any4(x, y, 1) && rng.next_double() < kBoundaryFlipProb) out.at(x, y) = 1;  // dilate
      }
    }
  }
  if (out.count() == 0) out = gt;  // tiny-mask safety
  return out;
}

}  // namespace

void validate(const PhantomSpec& spec) {
  if (spec.centers < 1) throw InvalidRangeError("phantom: centers must be >= 1");
  for (int c : spec.per_center)
    if (c < 0) throw InvalidRangeError("phantom: per-center counts must be >= 0");
  if (spec.image_size < 32) throw InvalidRangeError("phantom: image size too small");
  if (!(spec.gain_min > 0.0 && spec.gain_max >= spec.gain_min))
    throw InvalidRangeError("phantom: gains must be positive with min <= max");
  if (spec.size_jitter < 0.0 || spec.size_jitter >= 1.0)
    throw InvalidRangeError("phantom: size_jitter must be in [0, 1)");
}

DatasetManifest generate_dataset(const PhantomSpec& spec, const std::filesystem::path& out_dir) {
  validate(spec);
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  // Per-center acquisition gain, keyed on the center id alone so adding
  // cases never changes it.
  std::vector<double> center_gain(spec.centers + 1, 1.0);
  for (int c = 1; c <= spec.centers; ++c) {
    CounterRng rng(spec.seed, CounterRng::hash_combine(0x6761696e, static_cast<uint64_t>(c)));
    center_gain[c] = rng.next_uniform(spec.gain_min, spec.gain_max);
  }

  std::vector<CasePlan> plans;
  for (int c = 1; c <= spec.centers; ++c) {
    bool large = c == spec.large_center;
    int grid = large ? spec.image_size * 2 : spec.image_size;
    double spacing = static_cast<double>(spec.image_size) / grid;  // same physical extent
    for (size_t li = 0; li < kPathologyLabels.size(); ++li) {
      for (int i = 0; i < spec.per_center[li]; ++i) {
        CasePlan p;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "c%02d_%s_%03d", c, kPathologyLabels[li].c_str(), i);
        p.case_id = buf;
        p.center_id = c;
        p.label = kPathologyLabels[li];
        p.grid_size = grid;
        p.spacing = spacing;
        p.stream = CounterRng::hash_string(p.case_id);
        plans.push_back(std::move(p));
      }
    }
  }

  parallel_for(plans.size(), spec.workers, [&](size_t pi) {
    const CasePlan& plan = plans[pi];
    CounterRng rng(spec.seed, plan.stream);
    const double gain = center_gain[plan.center_id];
    const double extent = static_cast<double>(spec.image_size);  // mm

    double size_scale = rng.next_uniform(1.0 - spec.size_jitter, 1.0 + spec.size_jitter);
    double label_scale = 1.0, activity = 0.0;
    if (plan.label == "DG") {
      label_scale = 1.35;
      activity = kActivityDg;
    } else if (plan.label == "MNG") {
      activity = kActivityMng;
    } else {
      label_scale = 0.95;
      activity = kActivityTh;
    }

    Gland gland;
    gland.cy = extent / 2.0 + rng.next_uniform(-3.0, 3.0);
    double cx = extent / 2.0 + rng.next_uniform(-3.0, 3.0);
    gland.lx = cx - kLobeOffset * label_scale;
    gland.rx_c = cx + kLobeOffset * label_scale;
    gland.rx = kLobeRx * label_scale * size_scale;
    gland.ry = kLobeRy * label_scale * size_scale;

    std::vector<Nodule> nodules;
    if (plan.label == "MNG") {
      int n_nod = 3 + static_cast<int>(rng.next_below(4));  // 3..6
      for (int k = 0; k < n_nod; ++k) {
        Nodule nd;
        double lobe_cx = (k % 2 == 0) ? gland.lx : gland.rx_c;
        nd.cx = lobe_cx + rng.next_uniform(-0.5, 0.5) * gland.rx;
        nd.cy = gland.cy + rng.next_uniform(-0.6, 0.6) * gland.ry;
        nd.sigma = rng.next_uniform(2.5, 5.0);
        nd.amplitude = (k % 2 == 0 ? 30.0 : -14.0) * gain;
        nodules.push_back(nd);
      }
    }

    const int n = plan.grid_size;
    ImageGrid img = make_grid(n, n, plan.spacing, plan.spacing);
    BinaryMask gt = make_mask(n, n, plan.spacing, plan.spacing);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        double px = (x + 0.5) * plan.spacing;
        double py = (y + 0.5) * plan.spacing;
        double lambda = kBackground * gain;
        if (in_gland(gland, px, py)) {
          gt.at(x, y) = 1;
          lambda = activity * gain;
          for (const Nodule& nd : nodules) {
            double d2 = (px - nd.cx) * (px - nd.cx) + (py - nd.cy) * (py - nd.cy);
            lambda += nd.amplitude * std::exp(-d2 / (2.0 * nd.sigma * nd.sigma));
          }
        }
        lambda = std::max(lambda, 0.3);
        img.at(x, y) = rng.next_poisson(lambda);
      }
    }

    BinaryMask pred = perturb_boundary(gt, rng);

    write_scin_image(out_dir / "images" / (plan.case_id + ".json"), img, ScinDtype::U16);
    write_scin_mask(out_dir / "masks_gt" / (plan.case_id + ".json"), gt);
    write_scin_mask(out_dir / "masks_pred" / (plan.case_id + ".json"), pred);
  });

  DatasetManifest manifest;
  manifest.root = out_dir;
  for (const CasePlan& plan : plans) {
    ManifestCase mc;
    mc.case_id = plan.case_id;
    mc.center_id = plan.center_id;
    mc.label = plan.label;
    mc.image = out_dir / "images" / (plan.case_id + ".json");
    mc.physician_mask = out_dir / "masks_gt" / (plan.case_id + ".json");
    mc.predicted_mask = out_dir / "masks_pred" / (plan.case_id + ".json");
    manifest.cases.push_back(std::move(mc));
  }
  write_manifest(out_dir / "manifest.json", manifest);
  return load_manifest(out_dir / "manifest.json");
}

}  // namespace thyro
