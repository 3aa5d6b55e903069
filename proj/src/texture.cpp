#include "thyro/texture.hpp"

#include <cmath>

namespace thyro {

double TextureMatrix::sum() const {
  double s = 0.0;
  for (double v : m) s += v;
  return s;
}

std::vector<TextureMatrix> glcm_matrices(const DiscretizedRoi& roi, const ExtractionConfig& cfg) {
  if (roi.ng < 1) throw EmptyRoiError("glcm: empty ROI");
  if (cfg.glcm_distance < 1) throw InvalidRangeError("glcm: distance must be >= 1");

  std::vector<TextureMatrix> out;
  bool any = false;
  for (const Offset& dir : cfg.directions) {
    int dx = dir.dx * cfg.glcm_distance;
    int dy = dir.dy * cfg.glcm_distance;
    TextureMatrix counts(roi.ng, roi.ng);
    double total = 0.0;
    for (const RoiEntry& e : roi.entries) {
      int nx = e.x + dx, ny = e.y + dy;
      if (!roi.in_roi(nx, ny)) continue;
      int a = e.level - 1;
      int b = roi.level_at(nx, ny) - 1;
      counts.at(a, b) += 1.0;  // both orders: symmetric matrix
      counts.at(b, a) += 1.0;
      total += 2.0;
    }
    if (total == 0.0) {
      out.emplace_back();  // degenerate direction, rows == 0
      continue;
    }
    for (double& v : counts.m) v /= total;
    out.push_back(std::move(counts));
    any = true;
  }
  if (!any) throw DegenerateError("glcm: no valid pixel pair in any direction");
  return out;
}

TextureMatrix gldm_matrix(const DiscretizedRoi& roi) {
  if (roi.ng < 1) throw EmptyRoiError("gldm: empty ROI");
  // Dependence = count of 8-neighbors inside the ROI whose level matches the
  // center exactly (cutoff alpha = 0, distance 1).
  int max_dep = 0;
  std::vector<std::pair<int, int>> deps;  // (level, dependence) per pixel
  deps.reserve(roi.entries.size());
  for (const RoiEntry& e : roi.entries) {
    int d = 0;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        if (roi.in_roi(e.x + dx, e.y + dy) && roi.level_at(e.x + dx, e.y + dy) == e.level) ++d;
      }
    }
    deps.emplace_back(e.level, d);
    max_dep = std::max(max_dep, d);
  }
  TextureMatrix counts(roi.ng, max_dep + 1);
  for (auto [level, d] : deps) counts.at(level - 1, d) += 1.0;
  return counts;
}

std::vector<TextureMatrix> glrlm_matrices(const DiscretizedRoi& roi, const ExtractionConfig& cfg) {
  if (roi.ng < 1) throw EmptyRoiError("glrlm: empty ROI");
  std::vector<TextureMatrix> out;
  for (const Offset& dir : cfg.directions) {
    // Maximal runs of equal level along (dx, dy); a pixel starts a run when
    // its predecessor is outside the ROI or differs in level.
    std::vector<std::pair<int, int>> runs;  // (level, length)
    int max_len = 1;
    for (const RoiEntry& e : roi.entries) {
      int px = e.x - dir.dx, py = e.y - dir.dy;
      if (roi.in_roi(px, py) && roi.level_at(px, py) == e.level) continue;  // not a run start
      int len = 1;
      int nx = e.x + dir.dx, ny = e.y + dir.dy;
      while (roi.in_roi(nx, ny) && roi.level_at(nx, ny) == e.level) {
        ++len;
        nx += dir.dx;
        ny += dir.dy;
      }
      runs.emplace_back(e.level, len);
      max_len = std::max(max_len, len);
    }
    TextureMatrix counts(roi.ng, max_len);
    for (auto [level, len] : runs) counts.at(level - 1, len - 1) += 1.0;
    out.push_back(std::move(counts));
  }
  return out;
}

TextureMatrix glszm_matrix(const DiscretizedRoi& roi) {
  if (roi.ng < 1) throw EmptyRoiError("glszm: empty ROI");
  // Zones are 8-connected components of equal level.
  std::vector<char> visited(roi.level_grid.size(), 0);
  std::vector<std::pair<int, int>> zones;  // (level, size)
  int max_size = 1;
  std::vector<std::pair<int, int>> stack;
  for (const RoiEntry& e : roi.entries) {
    size_t start = static_cast<size_t>(e.y) * roi.width + e.x;
    if (visited[start]) continue;
    visited[start] = 1;
    stack.clear();
    stack.emplace_back(e.x, e.y);
    int size = 0;
    while (!stack.empty()) {
      auto [x, y] = stack.back();
      stack.pop_back();
      ++size;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          int nx = x + dx, ny = y + dy;
          if (!roi.in_roi(nx, ny) || roi.level_at(nx, ny) != e.level) continue;
          size_t idx = static_cast<size_t>(ny) * roi.width + nx;
          if (visited[idx]) continue;
          visited[idx] = 1;
          stack.emplace_back(nx, ny);
        }
      }
    }
    zones.emplace_back(e.level, size);
    max_size = std::max(max_size, size);
  }
  TextureMatrix counts(roi.ng, max_size);
  for (auto [level, size] : zones) counts.at(level - 1, size - 1) += 1.0;
  return counts;
}

NgtdmData ngtdm_data(const DiscretizedRoi& roi) {
  if (roi.ng < 1) throw EmptyRoiError("ngtdm: empty ROI");
  NgtdmData d;
  d.n.assign(roi.ng, 0.0);
  d.p.assign(roi.ng, 0.0);
  d.s.assign(roi.ng, 0.0);
  for (const RoiEntry& e : roi.entries) {
    double sum = 0.0;
    int cnt = 0;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        if (roi.in_roi(e.x + dx, e.y + dy)) {
          sum += roi.level_at(e.x + dx, e.y + dy);
          ++cnt;
        }
      }
    }
    if (cnt == 0) continue;  // isolated pixel: no valid neighborhood
    d.n[e.level - 1] += 1.0;
    d.s[e.level - 1] += std::abs(e.level - sum / cnt);
  }
  for (double v : d.n) d.nvp += v;
  if (d.nvp > 0.0)
    for (int i = 0; i < roi.ng; ++i) d.p[i] = d.n[i] / d.nvp;
  return d;
}

}  // namespace thyro
