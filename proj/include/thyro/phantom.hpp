#pragma once

#include <array>
#include <filesystem>

#include "thyro/lococv.hpp"

namespace thyro {

/// Deterministic synthetic multi-center scintigraphy phantom. Each case is a
/// two-lobe gland silhouette with a label-specific activity model:
///   DG  - uniform high uptake on an enlarged gland,
///   MNG - moderate background with several hot/cold nodules,
///   TH  - low uptake,
/// so expected ROI count totals order TH < MNG < DG. Pixel values are Poisson
/// draws around the activity model with a per-center multiplicative gain and
/// per-case gland-size jitter. A companion "predicted" mask is the ground
/// truth with a seeded one-pixel boundary perturbation (DSC around 0.85).
struct PhantomSpec {
  int centers = 9;
  std::array<int, 3> per_center = {20, 20, 20};  // cases per label: MNG, TH, DG
  int image_size = 128;
  int large_center = 5;      // generated at 256x256 / 0.5 mm; 0 disables
  double gain_min = 0.8;     // per-center gain ~ U(gain_min, gain_max)
  double gain_max = 1.25;
  double size_jitter = 0.1;  // lobe radii scale ~ U(1-j, 1+j)
  uint64_t seed = 0;
  int workers = 1;
};

void validate(const PhantomSpec& spec);

/// Generate SCIN images plus ground-truth and perturbed masks under out_dir
/// and write manifest.json. Byte-deterministic given spec.seed at any worker
/// count. Returns the loaded manifest.
DatasetManifest generate_dataset(const PhantomSpec& spec, const std::filesystem::path& out_dir);

}  // namespace thyro
