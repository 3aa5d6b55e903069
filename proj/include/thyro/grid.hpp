#pragma once

#include <cstdint>
#include <vector>

#include "thyro/errors.hpp"

namespace thyro {

/// 2D scalar pixel field with physical spacing. Pixels are stored row-major
/// (y * width + x) and hold photon counts or derived intensities.
struct ImageGrid {
  int width = 0;
  int height = 0;
  double spacing_x = 1.0;  // mm per pixel
  double spacing_y = 1.0;
  std::vector<double> pixels;

  double at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
  double& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
  size_t size() const { return pixels.size(); }
};

/// Per-pixel ROI membership aligned to an ImageGrid. Values are 0 or 1.
struct BinaryMask {
  int width = 0;
  int height = 0;
  double spacing_x = 1.0;
  double spacing_y = 1.0;
  std::vector<uint8_t> values;

  uint8_t at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
  uint8_t& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
  size_t size() const { return values.size(); }
  size_t count() const;
};

ImageGrid make_grid(int width, int height, double sx = 1.0, double sy = 1.0, double fill = 0.0);
BinaryMask make_mask(int width, int height, double sx = 1.0, double sy = 1.0, uint8_t fill = 0);

// Invariant checks; throw on violation.
void validate(const ImageGrid& img);
void validate(const BinaryMask& mask);

bool same_geometry(const ImageGrid& a, const ImageGrid& b);
bool same_geometry(const ImageGrid& a, const BinaryMask& b);
bool same_geometry(const BinaryMask& a, const BinaryMask& b);
void require_same_geometry(const ImageGrid& a, const BinaryMask& b);

struct RoiEntry {
  int x = 0;
  int y = 0;
  int level = 0;  // 1-based gray level
};

/// ROI pixels mapped to integer gray levels via fixed-bin-width discretization
/// anchored at the ROI minimum: level = floor((x - min_roi)/bin_width) + 1.
struct DiscretizedRoi {
  int width = 0;   // geometry of the source grid
  int height = 0;
  int ng = 0;      // number of gray levels = max level present
  double bin_width = 0.0;
  std::vector<RoiEntry> entries;   // row-major scan order
  std::vector<int> level_grid;     // width*height, 0 = outside ROI

  int level_at(int x, int y) const { return level_grid[static_cast<size_t>(y) * width + x]; }
  bool in_roi(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height && level_at(x, y) > 0;
  }
};

/// Clamp every pixel into [lo, hi].
ImageGrid clip_intensities(const ImageGrid& img, double lo, double hi);

/// Affine map of the full intensity range onto [0, 1].
ImageGrid minmax_normalize(const ImageGrid& img);

/// Standardize to mean 0 / population (divisor N) standard deviation 1.
ImageGrid zscore_normalize(const ImageGrid& img);

DiscretizedRoi discretize_roi(const ImageGrid& img, const BinaryMask& mask, double bin_width);

/// Raw ROI intensities in row-major scan order.
std::vector<double> roi_values(const ImageGrid& img, const BinaryMask& mask);

}  // namespace thyro
