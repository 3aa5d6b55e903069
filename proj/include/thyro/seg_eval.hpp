#pragma once

#include <functional>

#include "thyro/grid.hpp"

namespace thyro {

/// Predicted foreground probability per pixel, values in [0, 1].
struct ProbabilityMap {
  int width = 0;
  int height = 0;
  double spacing_x = 1.0;
  double spacing_y = 1.0;
  std::vector<double> values;

  double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
  double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
  size_t size() const { return values.size(); }
};

ProbabilityMap make_probability_map(int width, int height, double sx = 1.0, double sy = 1.0,
                                    double fill = 0.0);
void validate(const ProbabilityMap& p);

/// Soft Dice loss with a weighted false-positive penalty:
///   1 - (2*sum(p*g) + eps)/(sum(p) + sum(g) + eps)
///     + alpha * sum(p*(1-g))/(sum(p) + sum(g) + eps)
double dice_fp_loss(const ProbabilityMap& pred, const BinaryMask& gt, double alpha = 2.0,
                    double eps = 1e-5);

/// Dice similarity coefficient 2|A∩B|/(|A|+|B|); both empty -> 1.
double dsc(const BinaryMask& a, const BinaryMask& b);

using TileScorer = std::function<ImageGrid(const ImageGrid&)>;

/// Apply a tile scorer over 50%-overlapping windows covering the image
/// (edge tiles clamped inward) and average overlapping predictions with
/// uniform weights. Tiles are accumulated in fixed scan order.
ProbabilityMap sliding_window_apply(const ImageGrid& img, int window, const TileScorer& scorer);

inline ProbabilityMap sliding_window_apply(const ImageGrid& img, const TileScorer& scorer) {
  return sliding_window_apply(img, 128, scorer);
}

/// Pixel -> 1 iff p >= threshold.
BinaryMask binarize(const ProbabilityMap& p, double threshold = 0.5);

/// Sum of raw pixel values over mask-positive pixels.
double roi_counts(const ImageGrid& img, const BinaryMask& mask);

}  // namespace thyro
