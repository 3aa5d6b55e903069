#include "thyro/augment.hpp"

#include <cmath>

#include "thyro/resample.hpp"
#include "thyro/rng.hpp"

namespace thyro {

namespace {

// Distinct stream tags so patch sampling and affine draws never share a
// counter sequence for the same draw_index.
constexpr uint64_t kPatchTag = 0x70617463;   // "patc"
constexpr uint64_t kAffineTag = 0x6166666e;  // "affn"

CounterRng make_rng(const AugmentConfig& cfg, uint64_t op_tag, uint64_t draw_index) {
  uint64_t stream = CounterRng::hash_combine(CounterRng::hash_combine(op_tag, cfg.stream),
                                             draw_index);
  return CounterRng(cfg.seed, stream);
}

}  // namespace

void validate(const AugmentConfig& cfg) {
  if (cfg.patch_size <= 0) throw InvalidRangeError("augment: patch_size must be positive");
  if (cfg.fg_center_prob < 0.0 || cfg.fg_center_prob > 1.0)
    throw InvalidRangeError("augment: fg_center_prob must be in [0, 1]");
  if (cfg.scale_limit < 1.0) throw InvalidRangeError("augment: scale_limit must be >= 1");
  if (cfg.translation_range < 0.0 || cfg.rotation_range < 0.0)
    throw InvalidRangeError("augment: ranges must be nonnegative");
}

std::pair<ImageGrid, BinaryMask> sample_patch(const ImageGrid& img, const BinaryMask& mask,
                                              const AugmentConfig& cfg, uint64_t draw_index) {
  validate(cfg);
  require_same_geometry(img, mask);
  if (img.width < cfg.patch_size || img.height < cfg.patch_size)
    throw InvalidRangeError("sample_patch: image smaller than patch");

  std::vector<int> fg, bg;
  for (int i = 0; i < img.width * img.height; ++i)
    (mask.values[i] ? fg : bg).push_back(i);
  if (fg.empty()) throw SamplingError("sample_patch: mask has no foreground pixel");
  if (bg.empty()) throw SamplingError("sample_patch: mask has no background pixel");

  CounterRng rng = make_rng(cfg, kPatchTag, draw_index);
  const std::vector<int>& pool = rng.next_double() < cfg.fg_center_prob ? fg : bg;
  int center = pool[rng.next_below(pool.size())];
  int cx = center % img.width;
  int cy = center / img.width;

  int ps = cfg.patch_size;
  int x0 = std::min(std::max(cx - ps / 2, 0), img.width - ps);
  int y0 = std::min(std::max(cy - ps / 2, 0), img.height - ps);

  ImageGrid pimg = make_grid(ps, ps, img.spacing_x, img.spacing_y);
  BinaryMask pmask = make_mask(ps, ps, img.spacing_x, img.spacing_y);
  for (int y = 0; y < ps; ++y) {
    for (int x = 0; x < ps; ++x) {
      pimg.at(x, y) = img.at(x0 + x, y0 + y);
      pmask.at(x, y) = mask.at(x0 + x, y0 + y);
    }
  }
  return {std::move(pimg), std::move(pmask)};
}

std::pair<ImageGrid, BinaryMask> random_affine(const ImageGrid& img, const BinaryMask& mask,
                                               const AugmentConfig& cfg, uint64_t draw_index) {
  validate(cfg);
  require_same_geometry(img, mask);

  CounterRng rng = make_rng(cfg, kAffineTag, draw_index);
  // Fixed draw order: scale, rotation, translation x, translation y.
  double s = rng.next_uniform(1.0 / cfg.scale_limit, cfg.scale_limit);
  double theta = rng.next_uniform(-cfg.rotation_range, cfg.rotation_range);
  double tx = rng.next_uniform(-cfg.translation_range, cfg.translation_range);
  double ty = rng.next_uniform(-cfg.translation_range, cfg.translation_range);

  bool identity = s == 1.0 && theta == 0.0 && tx == 0.0 && ty == 0.0;
  if (identity) return {img, mask};

  // Forward map: scale then rotate about the index-space center, then
  // translate. Sampling inverts it per output pixel.
  double cx = (img.width - 1) * 0.5;
  double cy = (img.height - 1) * 0.5;
  double cos_t = std::cos(theta), sin_t = std::sin(theta);
  double inv_s = 1.0 / s;

  ImageGrid out_img = make_grid(img.width, img.height, img.spacing_x, img.spacing_y);
  BinaryMask out_mask = make_mask(mask.width, mask.height, mask.spacing_x, mask.spacing_y);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double dx = x - cx - tx;
      double dy = y - cy - ty;
      double rx = cos_t * dx + sin_t * dy;   // R(-theta)
      double ry = -sin_t * dx + cos_t * dy;
      double u = rx * inv_s + cx;
      double v = ry * inv_s + cy;
      out_img.at(x, y) = sample_at(img, u, v, Interp::Bilinear);
      int su = static_cast<int>(std::llround(u));
      int sv = static_cast<int>(std::llround(v));
      su = std::min(std::max(su, 0), mask.width - 1);
      sv = std::min(std::max(sv, 0), mask.height - 1);
      out_mask.at(x, y) = mask.at(su, sv);
    }
  }
  return {std::move(out_img), std::move(out_mask)};
}

}  // namespace thyro
