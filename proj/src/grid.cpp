#include "thyro/grid.hpp"

#include <algorithm>
#include <cmath>

namespace thyro {

size_t BinaryMask::count() const {
  size_t c = 0;
  for (uint8_t v : values) c += v;
  return c;
}

ImageGrid make_grid(int width, int height, double sx, double sy, double fill) {
  ImageGrid g;
  g.width = width;
  g.height = height;
  g.spacing_x = sx;
  g.spacing_y = sy;
  g.pixels.assign(static_cast<size_t>(width) * height, fill);
  validate(g);
  return g;
}

BinaryMask make_mask(int width, int height, double sx, double sy, uint8_t fill) {
  BinaryMask m;
  m.width = width;
  m.height = height;
  m.spacing_x = sx;
  m.spacing_y = sy;
  m.values.assign(static_cast<size_t>(width) * height, fill);
  validate(m);
  return m;
}

void validate(const ImageGrid& img) {
  if (img.width <= 0 || img.height <= 0)
    throw InvalidRangeError("image dimensions must be positive");
  if (img.spacing_x <= 0.0 || img.spacing_y <= 0.0)
    throw InvalidRangeError("image spacing must be positive");
  if (img.pixels.size() != static_cast<size_t>(img.width) * img.height)
    throw ContractError("pixel buffer length does not match width*height");
  for (double v : img.pixels)
    if (!std::isfinite(v)) throw ContractError("image contains a non-finite pixel");
}

void validate(const BinaryMask& mask) {
  if (mask.width <= 0 || mask.height <= 0)
    throw InvalidRangeError("mask dimensions must be positive");
  if (mask.spacing_x <= 0.0 || mask.spacing_y <= 0.0)
    throw InvalidRangeError("mask spacing must be positive");
  if (mask.values.size() != static_cast<size_t>(mask.width) * mask.height)
    throw ContractError("mask buffer length does not match width*height");
  for (uint8_t v : mask.values)
    if (v > 1) throw ContractError("mask values must be 0 or 1");
}

bool same_geometry(const ImageGrid& a, const ImageGrid& b) {
  return a.width == b.width && a.height == b.height && a.spacing_x == b.spacing_x &&
         a.spacing_y == b.spacing_y;
}

bool same_geometry(const ImageGrid& a, const BinaryMask& b) {
  return a.width == b.width && a.height == b.height && a.spacing_x == b.spacing_x &&
         a.spacing_y == b.spacing_y;
}

bool same_geometry(const BinaryMask& a, const BinaryMask& b) {
  return a.width == b.width && a.height == b.height && a.spacing_x == b.spacing_x &&
         a.spacing_y == b.spacing_y;
}

void require_same_geometry(const ImageGrid& a, const BinaryMask& b) {
  if (!same_geometry(a, b)) throw GeometryError("image and mask geometries do not match");
}

ImageGrid clip_intensities(const ImageGrid& img, double lo, double hi) {
  if (!(lo < hi)) throw InvalidRangeError("clip: lo must be < hi");
  ImageGrid out = img;
  for (double& v : out.pixels) v = std::min(hi, std::max(lo, v));
  return out;
}

ImageGrid minmax_normalize(const ImageGrid& img) {
  auto [mn_it, mx_it] = std::minmax_element(img.pixels.begin(), img.pixels.end());
  double mn = *mn_it, mx = *mx_it;
  if (mn == mx) throw DegenerateError("minmax_normalize: constant image");
  ImageGrid out = img;
  double inv = 1.0 / (mx - mn);
  for (double& v : out.pixels) v = (v - mn) * inv;
  return out;
}

ImageGrid zscore_normalize(const ImageGrid& img) {
  double mean = 0.0;
  for (double v : img.pixels) mean += v;
  mean /= static_cast<double>(img.pixels.size());
  double var = 0.0;
  for (double v : img.pixels) var += (v - mean) * (v - mean);
  var /= static_cast<double>(img.pixels.size());
  if (var == 0.0) throw DegenerateError("zscore_normalize: zero-variance image");
  double inv_sd = 1.0 / std::sqrt(var);
  ImageGrid out = img;
  for (double& v : out.pixels) v = (v - mean) * inv_sd;
  return out;
}

DiscretizedRoi discretize_roi(const ImageGrid& img, const BinaryMask& mask, double bin_width) {
  if (bin_width <= 0.0) throw InvalidRangeError("discretize_roi: bin_width must be positive");
  require_same_geometry(img, mask);

  double roi_min = 0.0;
  bool seen = false;
  for (size_t i = 0; i < mask.values.size(); ++i) {
    if (mask.values[i]) {
      double v = img.pixels[i];
      if (!seen || v < roi_min) roi_min = v;
      seen = true;
    }
  }
  if (!seen) throw EmptyRoiError("discretize_roi: empty mask");

  DiscretizedRoi roi;
  roi.width = img.width;
  roi.height = img.height;
  roi.bin_width = bin_width;
  roi.level_grid.assign(img.pixels.size(), 0);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (!mask.at(x, y)) continue;
      int level = static_cast<int>(std::floor((img.at(x, y) - roi_min) / bin_width)) + 1;
      if (level < 1) level = 1;  // guards fp rounding at the ROI minimum
      roi.entries.push_back({x, y, level});
      roi.level_grid[static_cast<size_t>(y) * img.width + x] = level;
      roi.ng = std::max(roi.ng, level);
    }
  }
  return roi;
}

std::vector<double> roi_values(const ImageGrid& img, const BinaryMask& mask) {
  require_same_geometry(img, mask);
  std::vector<double> vals;
  for (size_t i = 0; i < mask.values.size(); ++i)
    if (mask.values[i]) vals.push_back(img.pixels[i]);
  return vals;
}

}  // namespace thyro
