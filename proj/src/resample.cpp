#include "thyro/resample.hpp"

#include <algorithm>
#include <cmath>

namespace thyro {

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

inline double tap(const ImageGrid& img, int x, int y) {
  return img.at(clampi(x, 0, img.width - 1), clampi(y, 0, img.height - 1));
}

// Keys cubic convolution (a = -0.5), evaluated as Catmull-Rom on the four
// taps around u. Interpolating: t = 0 reproduces p1 exactly.
inline double cubic1d(double p0, double p1, double p2, double p3, double t) {
  double a0 = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
  double a1 = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
  double a2 = -0.5 * p0 + 0.5 * p2;
  return ((a0 * t + a1) * t + a2) * t + p1;
}

inline int nearest_index(double u, int n) {
  return clampi(static_cast<int>(std::llround(u)), 0, n - 1);
}

}  // namespace

double sample_at(const ImageGrid& img, double u, double v, Interp method) {
  switch (method) {
    case Interp::Nearest:
      return img.at(nearest_index(u, img.width), nearest_index(v, img.height));
    case Interp::Bilinear: {
      int x0 = static_cast<int>(std::floor(u));
      int y0 = static_cast<int>(std::floor(v));
      double tx = u - x0, ty = v - y0;
      double a = tap(img, x0, y0) * (1.0 - tx) + tap(img, x0 + 1, y0) * tx;
      double b = tap(img, x0, y0 + 1) * (1.0 - tx) + tap(img, x0 + 1, y0 + 1) * tx;
      return a * (1.0 - ty) + b * ty;
    }
    case Interp::Cubic: {
      int x0 = static_cast<int>(std::floor(u));
      int y0 = static_cast<int>(std::floor(v));
      double tx = u - x0, ty = v - y0;
      double rows[4];
      for (int r = 0; r < 4; ++r) {
        int y = y0 - 1 + r;
        rows[r] = cubic1d(tap(img, x0 - 1, y), tap(img, x0, y), tap(img, x0 + 1, y),
                          tap(img, x0 + 2, y), tx);
      }
      return cubic1d(rows[0], rows[1], rows[2], rows[3], ty);
    }
  }
  throw ContractError("unknown interpolation method");
}

namespace {

ImageGrid resample_impl(const ImageGrid& img, int out_w, int out_h, double tx, double ty,
                        Interp method) {
  if (out_w == img.width && out_h == img.height && tx == img.spacing_x && ty == img.spacing_y)
    return img;  // bit-exact identity
  ImageGrid out;
  out.width = out_w;
  out.height = out_h;
  out.spacing_x = tx;
  out.spacing_y = ty;
  out.pixels.resize(static_cast<size_t>(out_w) * out_h);
  // Pixel centers: output (i,j) sits at ((i+0.5)*tx, (j+0.5)*ty), mapped to
  // continuous input index space.
  for (int j = 0; j < out_h; ++j) {
    double v = ((j + 0.5) * ty) / img.spacing_y - 0.5;
    for (int i = 0; i < out_w; ++i) {
      double u = ((i + 0.5) * tx) / img.spacing_x - 0.5;
      out.at(i, j) = sample_at(img, u, v, method);
    }
  }
  return out;
}

}  // namespace

ImageGrid resample_to_spacing(const ImageGrid& img, double tx, double ty, Interp method) {
  validate(img);
  if (tx <= 0.0 || ty <= 0.0) throw InvalidRangeError("resample: target spacing must be positive");
  int out_w = std::max(1, static_cast<int>(std::llround(img.width * img.spacing_x / tx)));
  int out_h = std::max(1, static_cast<int>(std::llround(img.height * img.spacing_y / ty)));
  return resample_impl(img, out_w, out_h, tx, ty, method);
}

ImageGrid resample_to_size(const ImageGrid& img, int out_w, int out_h, Interp method) {
  validate(img);
  if (out_w <= 0 || out_h <= 0) throw InvalidRangeError("resample: target size must be positive");
  double tx = img.width * img.spacing_x / out_w;
  double ty = img.height * img.spacing_y / out_h;
  return resample_impl(img, out_w, out_h, tx, ty, method);
}

namespace {

ImageGrid mask_as_grid(const BinaryMask& m) {
  ImageGrid g;
  g.width = m.width;
  g.height = m.height;
  g.spacing_x = m.spacing_x;
  g.spacing_y = m.spacing_y;
  g.pixels.assign(m.values.begin(), m.values.end());
  return g;
}

BinaryMask grid_as_mask(const ImageGrid& g) {
  BinaryMask m;
  m.width = g.width;
  m.height = g.height;
  m.spacing_x = g.spacing_x;
  m.spacing_y = g.spacing_y;
  m.values.resize(g.pixels.size());
  for (size_t i = 0; i < g.pixels.size(); ++i) m.values[i] = g.pixels[i] != 0.0 ? 1 : 0;
  return m;
}

}  // namespace

BinaryMask resample_to_spacing(const BinaryMask& mask, double tx, double ty) {
  validate(mask);
  return grid_as_mask(resample_to_spacing(mask_as_grid(mask), tx, ty, Interp::Nearest));
}

BinaryMask resample_to_size(const BinaryMask& mask, int out_w, int out_h) {
  validate(mask);
  return grid_as_mask(resample_to_size(mask_as_grid(mask), out_w, out_h, Interp::Nearest));
}

}  // namespace thyro
