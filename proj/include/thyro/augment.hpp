#pragma once

#include <cstdint>
#include <utility>

#include "thyro/grid.hpp"

namespace thyro {

/// Seeded randomized training transforms. All draws come from a counter-based
/// generator keyed by (seed, stream, draw_index), so outputs are a pure
/// function of the arguments and parallel execution order cannot change them.
/// `stream` is meant to carry a case-id hash when augmenting a dataset.
struct AugmentConfig {
  int patch_size = 64;
  double fg_center_prob = 2.0 / 3.0;
  double translation_range = 5.0;               // pixels, symmetric
  double rotation_range = 0.2617993877991494;   // pi/12 radians, symmetric
  double scale_limit = 1.1;                     // s ~ U(1/limit, limit)
  uint64_t seed = 0;
  uint64_t stream = 0;
};

void validate(const AugmentConfig& cfg);

/// Class-balanced patch crop: the center pixel is drawn uniformly from
/// foreground pixels with probability fg_center_prob, else uniformly from
/// background pixels; the window is clamped to stay inside the image.
std::pair<ImageGrid, BinaryMask> sample_patch(const ImageGrid& img, const BinaryMask& mask,
                                              const AugmentConfig& cfg, uint64_t draw_index);

/// Random affine: isotropic scale, rotation about the grid center, then
/// translation, composed into one transform and applied in a single
/// resampling pass (bilinear for the image, nearest for the mask).
std::pair<ImageGrid, BinaryMask> random_affine(const ImageGrid& img, const BinaryMask& mask,
                                               const AugmentConfig& cfg, uint64_t draw_index);

}  // namespace thyro
