#pragma once

#include "thyro/grid.hpp"

namespace thyro {

enum class Interp { Nearest, Bilinear, Cubic };

/// Spatial resampling with pixel-center alignment: pixel (i,j) sits at
/// physical ((i+0.5)*sx, (j+0.5)*sy) and the output spans the same physical
/// extent as the input. Out-of-bounds taps clamp to the edge. Cubic is the
/// Keys convolution kernel (a = -0.5), an interpolating local stand-in for
/// B-spline resampling.
ImageGrid resample_to_spacing(const ImageGrid& img, double tx, double ty, Interp method);
ImageGrid resample_to_size(const ImageGrid& img, int out_w, int out_h, Interp method);

// Masks resample with nearest neighbor only.
BinaryMask resample_to_spacing(const BinaryMask& mask, double tx, double ty);
BinaryMask resample_to_size(const BinaryMask& mask, int out_w, int out_h);

/// Single interpolated tap at continuous index (u, v) with edge clamping.
double sample_at(const ImageGrid& img, double u, double v, Interp method);

}  // namespace thyro
