#pragma once

#include <array>
#include <vector>

#include "thyro/grid.hpp"

namespace thyro {

struct Offset {
  int dx = 0;
  int dy = 0;
};

/// The four unique 2D directions at distance 1.
inline constexpr std::array<Offset, 4> kDefaultDirections = {
    Offset{1, 0}, Offset{0, 1}, Offset{1, 1}, Offset{1, -1}};

struct ExtractionConfig {
  double bin_width = 0.3;
  int glcm_distance = 1;
  std::vector<Offset> directions{kDefaultDirections.begin(), kDefaultDirections.end()};
  double coarseness_cap = 1e6;
};

/// Dense nonnegative matrix used for every texture family. Rows index gray
/// level (1-based level i lives in row i-1); columns index the family's
/// second axis (co-occurring level, run length, zone size, dependence count).
struct TextureMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> m;

  TextureMatrix() = default;
  TextureMatrix(int r, int c) : rows(r), cols(c), m(static_cast<size_t>(r) * c, 0.0) {}
  double at(int r, int c) const { return m[static_cast<size_t>(r) * cols + c]; }
  double& at(int r, int c) { return m[static_cast<size_t>(r) * cols + c]; }
  double sum() const;
};

/// Symmetric co-occurrence probabilities, one matrix per direction (pairs
/// counted in both orders, normalized to sum 1). Directions with no valid
/// in-ROI pair come back empty (rows == 0); throws DegenerateError if every
/// direction is empty.
std::vector<TextureMatrix> glcm_matrices(const DiscretizedRoi& roi, const ExtractionConfig& cfg);

/// Dependence counts: row = level, column d = number of 8-neighbors inside
/// the ROI with the same level (cutoff alpha = 0). Raw counts.
TextureMatrix gldm_matrix(const DiscretizedRoi& roi);

/// Run-length counts per direction: row = level, column r-1 = run length r.
std::vector<TextureMatrix> glrlm_matrices(const DiscretizedRoi& roi, const ExtractionConfig& cfg);

/// Zone-size counts: row = level, column s-1 = size of an 8-connected
/// equal-level component.
TextureMatrix glszm_matrix(const DiscretizedRoi& roi);

/// Per-level neighborhood gray-tone difference data: n_i (pixels of level i
/// with at least one in-ROI 8-neighbor), p_i = n_i / Nvp, and
/// s_i = sum over those pixels of |i - mean neighbor level|.
struct NgtdmData {
  std::vector<double> n;  // size ng
  std::vector<double> p;
  std::vector<double> s;
  double nvp = 0.0;
};

NgtdmData ngtdm_data(const DiscretizedRoi& roi);

}  // namespace thyro
