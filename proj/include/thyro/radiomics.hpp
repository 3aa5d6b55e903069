#pragma once

#include <string>
#include <vector>

#include "thyro/grid.hpp"
#include "thyro/texture.hpp"

namespace thyro {

/// Canonical feature set: 18 first-order, 24 GLCM, 14 GLDM, 16 GLRLM,
/// 16 GLSZM and 5 NGTDM features (93 total). Names are `<FAMILY>_<Feature>`
/// and the canonical order is family order FO, GLCM, GLDM, GLRLM, GLSZM,
/// NGTDM with ASCII-alphabetical order inside each family.

inline constexpr int kFeatureCount = 93;

const std::vector<std::string>& fo_feature_names();      // 18, bare names
const std::vector<std::string>& glcm_feature_names();    // 24
const std::vector<std::string>& gldm_feature_names();    // 14
const std::vector<std::string>& glrlm_feature_names();   // 16
const std::vector<std::string>& glszm_feature_names();   // 16
const std::vector<std::string>& ngtdm_feature_names();   // 5

/// The 93 prefixed names in canonical order.
const std::vector<std::string>& canonical_feature_names();

struct FeatureVector {
  std::string case_id;
  std::vector<double> values;  // aligned with canonical_feature_names()
};

/// First-order statistics over the raw ROI intensities; Entropy and
/// Uniformity use the fixed-bin-width discretized histogram. Percentiles
/// interpolate linearly between order statistics; Kurtosis is the Pearson
/// (non-excess) m4/m2^2 form. Throws DegenerateError on a zero-variance ROI.
std::vector<double> first_order_features(const ImageGrid& img, const BinaryMask& mask,
                                         double bin_width = 0.3);

/// 24 GLCM features per direction, averaged over non-degenerate directions.
std::vector<double> glcm_features(const std::vector<TextureMatrix>& per_direction);
std::vector<double> gldm_features(const DiscretizedRoi& roi);
std::vector<double> glrlm_features(const DiscretizedRoi& roi, const ExtractionConfig& cfg);
std::vector<double> glszm_features(const DiscretizedRoi& roi);
std::vector<double> ngtdm_features(const DiscretizedRoi& roi, double coarseness_cap = 1e6);

/// Full 93-value extraction in canonical order. Expects preprocessing
/// (z-score + 1 mm resampling) to have been applied already. Throws on any
/// family degeneracy with a named reason.
std::vector<double> extract_all(const ImageGrid& img, const BinaryMask& mask,
                                const ExtractionConfig& cfg = {});

/// Standard preprocessing ahead of extraction: z-score normalize the image,
/// then resample image (cubic) and mask (nearest) to 1 mm spacing.
std::pair<ImageGrid, BinaryMask> preprocess_for_extraction(const ImageGrid& img,
                                                           const BinaryMask& mask);

}  // namespace thyro
