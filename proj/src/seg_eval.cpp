#include "thyro/seg_eval.hpp"

#include <algorithm>
#include <cmath>

namespace thyro {

ProbabilityMap make_probability_map(int width, int height, double sx, double sy, double fill) {
  ProbabilityMap p;
  p.width = width;
  p.height = height;
  p.spacing_x = sx;
  p.spacing_y = sy;
  p.values.assign(static_cast<size_t>(width) * height, fill);
  validate(p);
  return p;
}

void validate(const ProbabilityMap& p) {
  if (p.width <= 0 || p.height <= 0) throw InvalidRangeError("probability map dimensions must be positive");
  if (p.values.size() != static_cast<size_t>(p.width) * p.height)
    throw ContractError("probability buffer length does not match width*height");
  for (double v : p.values)
    if (!(v >= 0.0 && v <= 1.0)) throw ContractError("probability outside [0, 1]");
}

namespace {

void require_same_geometry(const ProbabilityMap& a, const BinaryMask& b) {
  if (a.width != b.width || a.height != b.height || a.spacing_x != b.spacing_x ||
      a.spacing_y != b.spacing_y)
    throw GeometryError("probability map and mask geometries do not match");
}

}  // namespace

double dice_fp_loss(const ProbabilityMap& pred, const BinaryMask& gt, double alpha, double eps) {
  require_same_geometry(pred, gt);
  if (eps <= 0.0) throw InvalidRangeError("dice_fp_loss: eps must be positive");
  if (alpha < 0.0) throw InvalidRangeError("dice_fp_loss: alpha must be nonnegative");
  double inter = 0.0, sum_p = 0.0, sum_g = 0.0, fp = 0.0;
  for (size_t i = 0; i < pred.values.size(); ++i) {
    double p = pred.values[i];
    double g = gt.values[i];
    inter += p * g;
    sum_p += p;
    sum_g += g;
    fp += p * (1.0 - g);
  }
  double denom = sum_p + sum_g + eps;
  return 1.0 - (2.0 * inter + eps) / denom + alpha * fp / denom;
}

double dsc(const BinaryMask& a, const BinaryMask& b) {
  if (!same_geometry(a, b)) throw GeometryError("dsc: mask geometries do not match");
  size_t inter = 0, ca = 0, cb = 0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    ca += a.values[i];
    cb += b.values[i];
    inter += a.values[i] & b.values[i];
  }
  if (ca + cb == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(ca + cb);
}

namespace {

// Tile origins with 50% overlap; the final tile is clamped inward so the
// whole axis is covered.
std::vector<int> tile_origins(int extent, int window) {
  std::vector<int> origins;
  int step = std::max(1, window / 2);
  for (int pos = 0;; pos += step) {
    int clamped = std::min(pos, extent - window);
    if (origins.empty() || origins.back() != clamped) origins.push_back(clamped);
    if (pos >= extent - window) break;
  }
  return origins;
}

}  // namespace

ProbabilityMap sliding_window_apply(const ImageGrid& img, int window, const TileScorer& scorer) {
  validate(img);
  if (window <= 0) throw InvalidRangeError("sliding_window_apply: window must be positive");
  int wx = std::min(window, img.width);
  int wy = std::min(window, img.height);

  std::vector<double> accum(img.pixels.size(), 0.0);
  std::vector<double> weight(img.pixels.size(), 0.0);

  for (int oy : tile_origins(img.height, wy)) {
    for (int ox : tile_origins(img.width, wx)) {
      ImageGrid tile = make_grid(wx, wy, img.spacing_x, img.spacing_y);
      for (int y = 0; y < wy; ++y)
        for (int x = 0; x < wx; ++x) tile.at(x, y) = img.at(ox + x, oy + y);
      ImageGrid scored = scorer(tile);
      if (scored.width != wx || scored.height != wy)
        throw ContractError("sliding_window_apply: scorer output shape mismatch");
      for (int y = 0; y < wy; ++y) {
        for (int x = 0; x < wx; ++x) {
          size_t idx = static_cast<size_t>(oy + y) * img.width + (ox + x);
          accum[idx] += scored.at(x, y);
          weight[idx] += 1.0;
        }
      }
    }
  }

  ProbabilityMap out;
  out.width = img.width;
  out.height = img.height;
  out.spacing_x = img.spacing_x;
  out.spacing_y = img.spacing_y;
  out.values.resize(accum.size());
  for (size_t i = 0; i < accum.size(); ++i) out.values[i] = accum[i] / weight[i];
  validate(out);
  return out;
}

BinaryMask binarize(const ProbabilityMap& p, double threshold) {
  validate(p);
  if (threshold < 0.0 || threshold > 1.0)
    throw InvalidRangeError("binarize: threshold must be in [0, 1]");
  BinaryMask m = make_mask(p.width, p.height, p.spacing_x, p.spacing_y);
  for (size_t i = 0; i < p.values.size(); ++i) m.values[i] = p.values[i] >= threshold ? 1 : 0;
  return m;
}

double roi_counts(const ImageGrid& img, const BinaryMask& mask) {
  require_same_geometry(img, mask);
  double sum = 0.0;
  for (size_t i = 0; i < mask.values.size(); ++i)
    if (mask.values[i]) sum += img.pixels[i];
  return sum;
}

}  // namespace thyro
