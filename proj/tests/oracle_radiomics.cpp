#include "oracle_radiomics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace oracle {

using thyro::BinaryMask;
using thyro::ImageGrid;

namespace {

struct Pixel {
  int x, y, level;
};

double q_linear(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  double pos = q * (static_cast<double>(v.size()) - 1.0) / 100.0;
  auto lo = static_cast<size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] * (1.0 - (pos - lo)) + v[lo + 1] * (pos - lo);
}

double entropy2(const std::vector<double>& p) {
  double e = 0.0;
  for (double v : p)
    if (v > 0.0) e -= v * std::log2(v);
  return e;
}

// ---- first order ------------------------------------------------------

void first_order(const ImageGrid& img, const std::vector<Pixel>& px, int ng,
                 std::map<std::string, double>& out) {
  std::vector<double> v;
  for (const Pixel& p : px) v.push_back(img.at(p.x, p.y));
  double n = static_cast<double>(v.size());

  double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double m2 = 0, m3 = 0, m4 = 0, energy = 0, mad = 0;
  for (double x : v) {
    m2 += std::pow(x - mean, 2.0);
    m3 += std::pow(x - mean, 3.0);
    m4 += std::pow(x - mean, 4.0);
    energy += x * x;
    mad += std::abs(x - mean);
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  mad /= n;

  double p10 = q_linear(v, 10), p90 = q_linear(v, 90);
  std::vector<double> mid;
  for (double x : v)
    if (x >= p10 && x <= p90) mid.push_back(x);
  double rmad = 0.0;
  if (!mid.empty()) {
    double mm = std::accumulate(mid.begin(), mid.end(), 0.0) / static_cast<double>(mid.size());
    for (double x : mid) rmad += std::abs(x - mm);
    rmad /= static_cast<double>(mid.size());
  }

  std::vector<double> hist(ng, 0.0);
  for (const Pixel& p : px) hist[p.level - 1] += 1.0 / n;
  double unif = 0.0;
  for (double h : hist) unif += h * h;

  out["FO_10Percentile"] = p10;
  out["FO_90Percentile"] = p90;
  out["FO_Energy"] = energy;
  out["FO_Entropy"] = entropy2(hist);
  out["FO_InterquartileRange"] = q_linear(v, 75) - q_linear(v, 25);
  out["FO_Kurtosis"] = m4 / (m2 * m2);
  out["FO_Maximum"] = *std::max_element(v.begin(), v.end());
  out["FO_Mean"] = mean;
  out["FO_MeanAbsoluteDeviation"] = mad;
  out["FO_Median"] = q_linear(v, 50);
  out["FO_Minimum"] = *std::min_element(v.begin(), v.end());
  out["FO_Range"] = out["FO_Maximum"] - out["FO_Minimum"];
  out["FO_RobustMeanAbsoluteDeviation"] = rmad;
  out["FO_RootMeanSquared"] = std::sqrt(energy / n);
  out["FO_Skewness"] = m3 / std::pow(m2, 1.5);
  out["FO_TotalEnergy"] = img.spacing_x * img.spacing_y * energy;
  out["FO_Uniformity"] = unif;
  out["FO_Variance"] = m2;
}

// ---- GLCM --------------------------------------------------------------

// Power iteration with deflation for the top two eigenvalues of a symmetric
// PSD matrix.
double second_eigenvalue(const std::vector<std::vector<double>>& s) {
  size_t n = s.size();
  auto matvec = [&](const std::vector<double>& v) {
    std::vector<double> r(n, 0.0);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) r[i] += s[i][j] * v[j];
    return r;
  };
  auto norm = [](const std::vector<double>& v) {
    double t = 0.0;
    for (double x : v) t += x * x;
    return std::sqrt(t);
  };
  auto power = [&](const std::vector<double>& deflate) {
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i) v[i] = std::sin(static_cast<double>(i) + 1.0);
    double nv = norm(v);
    for (double& x : v) x /= nv;
    double lambda = 0.0;
    for (int it = 0; it < 200000; ++it) {
      std::vector<double> w = matvec(v);
      if (!deflate.empty()) {
        double proj = 0.0;
        for (size_t i = 0; i < n; ++i) proj += deflate[i] * w[i];
        for (size_t i = 0; i < n; ++i) w[i] -= proj * deflate[i];
      }
      double nw = norm(w);
      if (nw < 1e-280) return std::pair<double, std::vector<double>>{0.0, v};
      for (double& x : w) x /= nw;
      double rq = 0.0;
      std::vector<double> sw = matvec(w);
      for (size_t i = 0; i < n; ++i) rq += w[i] * sw[i];
      if (it > 2 && std::abs(rq - lambda) < 1e-15 * std::max(1.0, std::abs(rq)))
        return std::pair<double, std::vector<double>>{rq, w};
      lambda = rq;
      v = std::move(w);
    }
    return std::pair<double, std::vector<double>>{lambda, v};
  };
  auto [l1, u1] = power({});
  (void)l1;
  auto [l2, u2] = power(u1);
  (void)u2;
  return l2;
}

std::map<std::string, double> glcm_one(const std::vector<std::vector<double>>& p, int ng) {
  std::map<std::string, double> f;
  auto px = std::vector<double>(ng, 0.0);
  auto py = std::vector<double>(ng, 0.0);
  for (int i = 0; i < ng; ++i)
    for (int j = 0; j < ng; ++j) {
      px[i] += p[i][j];
      py[j] += p[i][j];
    }
  double mux = 0, muy = 0;
  for (int i = 0; i < ng; ++i) {
    mux += (i + 1) * px[i];
    muy += (i + 1) * py[i];
  }
  double sx = 0, sy = 0;
  for (int i = 0; i < ng; ++i) {
    sx += px[i] * std::pow(i + 1 - mux, 2.0);
    sy += py[i] * std::pow(i + 1 - muy, 2.0);
  }

  double autoc = 0;
  for (int i = 0; i < ng; ++i)
    for (int j = 0; j < ng; ++j) autoc += (i + 1.0) * (j + 1.0) * p[i][j];
  f["Autocorrelation"] = autoc;
  for (int pow4 = 2; pow4 <= 4; ++pow4) {
    double acc = 0;
    for (int i = 0; i < ng; ++i)
      for (int j = 0; j < ng; ++j)
        acc += std::pow(i + j + 2.0 - mux - muy, static_cast<double>(pow4)) * p[i][j];
    if (pow4 == 2) f["ClusterTendency"] = acc;
    if (pow4 == 3) f["ClusterShade"] = acc;
    if (pow4 == 4) f["ClusterProminence"] = acc;
  }
  {
    double acc = 0;
    for (int i = 0; i < ng; ++i)
      for (int j = 0; j < ng; ++j) acc += std::pow(static_cast<double>(i - j), 2.0) * p[i][j];
    f["Contrast"] = acc;
  }
  f["Correlation"] = sx * sy > 0 ? (autoc - mux * muy) / std::sqrt(sx * sy) : 1.0;

  std::vector<double> pplus(2 * ng + 1, 0.0), pminus(ng, 0.0);
  for (int i = 0; i < ng; ++i)
    for (int j = 0; j < ng; ++j) {
      pplus[i + j + 2] += p[i][j];
      pminus[std::abs(i - j)] += p[i][j];
    }
  double d_avg = 0;
  for (int k = 0; k < ng; ++k) d_avg += k * pminus[k];
  f["DifferenceAverage"] = d_avg;
  f["DifferenceEntropy"] = entropy2(pminus);
  {
    double acc = 0;
    for (int k = 0; k < ng; ++k) acc += std::pow(k - d_avg, 2.0) * pminus[k];
    f["DifferenceVariance"] = acc;
  }
  double id = 0, idm = 0, idmn = 0, idn = 0, iv = 0;
  for (int k = 0; k < ng; ++k) {
    id += pminus[k] / (1.0 + k);
    idm += pminus[k] / (1.0 + static_cast<double>(k) * k);
    idmn += pminus[k] / (1.0 + static_cast<double>(k) * k / ng / ng);
    idn += pminus[k] / (1.0 + static_cast<double>(k) / ng);
    if (k > 0) iv += pminus[k] / (static_cast<double>(k) * k);
  }
  f["Id"] = id;
  f["Idm"] = idm;
  f["Idmn"] = idmn;
  f["Idn"] = idn;
  f["InverseVariance"] = iv;

  double hx = entropy2(px), hy = entropy2(py);
  double hxy = 0, hxy1 = 0, hxy2 = 0;
  for (int i = 0; i < ng; ++i)
    for (int j = 0; j < ng; ++j) {
      if (p[i][j] > 0) {
        hxy -= p[i][j] * std::log2(p[i][j]);
        hxy1 -= p[i][j] * std::log2(px[i] * py[j]);
      }
      if (px[i] * py[j] > 0) hxy2 -= px[i] * py[j] * std::log2(px[i] * py[j]);
    }
  f["Imc1"] = std::max(hx, hy) > 0 ? (hxy - hxy1) / std::max(hx, hy) : 0.0;
  f["Imc2"] = std::sqrt(1.0 - std::exp(-2.0 * std::max(0.0, hxy2 - hxy)));
  f["JointAverage"] = mux;
  {
    double acc = 0;
    for (int i = 0; i < ng; ++i)
      for (int j = 0; j < ng; ++j) acc += p[i][j] * p[i][j];
    f["JointEnergy"] = acc;
  }
  f["JointEntropy"] = hxy;

  // MCC over occupied rows/columns.
  std::vector<int> occ;
  for (int i = 0; i < ng; ++i)
    if (px[i] > 0) occ.push_back(i);
  if (occ.size() < 2) {
    f["MCC"] = 1.0;
  } else {
    size_t m = occ.size();
    std::vector<std::vector<double>> s(m, std::vector<double>(m, 0.0));
    for (size_t a = 0; a < m; ++a)
      for (size_t b = 0; b < m; ++b) {
        double acc = 0;
        for (size_t c = 0; c < m; ++c)
          if (py[occ[c]] > 0) acc += p[occ[a]][occ[c]] * p[occ[b]][occ[c]] / py[occ[c]];
        s[a][b] = acc / std::sqrt(px[occ[a]] * px[occ[b]]);
      }
    double l2 = second_eigenvalue(s);
    f["MCC"] = std::sqrt(std::min(1.0, std::max(0.0, l2)));
  }

  double mp = 0;
  for (int i = 0; i < ng; ++i)
    for (int j = 0; j < ng; ++j) mp = std::max(mp, p[i][j]);
  f["MaximumProbability"] = mp;
  double s_avg = 0;
  for (int k = 2; k <= 2 * ng; ++k) s_avg += k * pplus[k];
  f["SumAverage"] = s_avg;
  f["SumEntropy"] = entropy2(pplus);
  {
    double acc = 0;
    for (int i = 0; i < ng; ++i)
      for (int j = 0; j < ng; ++j) acc += std::pow(i + 1.0 - mux, 2.0) * p[i][j];
    f["SumSquares"] = acc;
  }
  return f;
}

void glcm(const std::vector<Pixel>& px, int ng, std::map<std::string, double>& out) {
  const int dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  std::map<std::string, double> sum;
  int used = 0;
  for (auto& dir : dirs) {
    std::vector<std::vector<double>> p(ng, std::vector<double>(ng, 0.0));
    double total = 0.0;
    // quadratic pair scan
    for (const Pixel& a : px)
      for (const Pixel& b : px)
        if (b.x - a.x == dir[0] && b.y - a.y == dir[1]) {
          p[a.level - 1][b.level - 1] += 1.0;
          p[b.level - 1][a.level - 1] += 1.0;
          total += 2.0;
        }
    if (total == 0.0) continue;
    for (auto& row : p)
      for (double& v : row) v /= total;
    for (auto& [k, v] : glcm_one(p, ng)) sum[k] += v;
    ++used;
  }
  for (auto& [k, v] : sum) out["GLCM_" + k] = v / used;
}

// ---- GLDM --------------------------------------------------------------

void gldm(const std::vector<Pixel>& px, int ng, std::map<std::string, double>& out) {
  std::vector<std::pair<int, int>> cells;  // (level, dependence)
  int max_dep = 0;
  for (const Pixel& a : px) {
    int dep = 0;
    for (const Pixel& b : px) {
      int dx = std::abs(a.x - b.x), dy = std::abs(a.y - b.y);
      if (std::max(dx, dy) == 1 && b.level == a.level) ++dep;
    }
    cells.emplace_back(a.level, dep);
    max_dep = std::max(max_dep, dep);
  }
  double nz = static_cast<double>(cells.size());
  std::vector<std::vector<double>> P(ng, std::vector<double>(max_dep + 1, 0.0));
  for (auto [lvl, dep] : cells) P[lvl - 1][dep] += 1.0;

  double sde = 0, lde = 0, gln = 0, dn = 0, mu_i = 0, mu_j = 0, de = 0;
  double lgle = 0, hgle = 0, sdl = 0, sdh = 0, ldl = 0, ldh = 0;
  for (int i = 0; i < ng; ++i) {
    double rowsum = std::accumulate(P[i].begin(), P[i].end(), 0.0);
    gln += rowsum * rowsum;
    for (int d = 0; d <= max_dep; ++d) {
      double pij = P[i][d] / nz;
      double gi = i + 1.0, j = d + 1.0;
      sde += pij / (j * j);
      lde += pij * j * j;
      mu_i += pij * gi;
      mu_j += pij * j;
      if (pij > 0) de -= pij * std::log2(pij);
      lgle += pij / (gi * gi);
      hgle += pij * gi * gi;
      sdl += pij / (gi * gi * j * j);
      sdh += pij * gi * gi / (j * j);
      ldl += pij * j * j / (gi * gi);
      ldh += pij * gi * gi * j * j;
    }
  }
  for (int d = 0; d <= max_dep; ++d) {
    double colsum = 0;
    for (int i = 0; i < ng; ++i) colsum += P[i][d];
    dn += colsum * colsum;
  }
  double glv = 0, dv = 0;
  for (int i = 0; i < ng; ++i)
    for (int d = 0; d <= max_dep; ++d) {
      double pij = P[i][d] / nz;
      glv += pij * std::pow(i + 1.0 - mu_i, 2.0);
      dv += pij * std::pow(d + 1.0 - mu_j, 2.0);
    }

  out["GLDM_DependenceEntropy"] = de;
  out["GLDM_DependenceNonUniformity"] = dn / nz;
  out["GLDM_DependenceNonUniformityNormalized"] = dn / (nz * nz);
  out["GLDM_DependenceVariance"] = dv;
  out["GLDM_GrayLevelNonUniformity"] = gln / nz;
  out["GLDM_GrayLevelVariance"] = glv;
  out["GLDM_HighGrayLevelEmphasis"] = hgle;
  out["GLDM_LargeDependenceEmphasis"] = lde;
  out["GLDM_LargeDependenceHighGrayLevelEmphasis"] = ldh;
  out["GLDM_LargeDependenceLowGrayLevelEmphasis"] = ldl;
  out["GLDM_LowGrayLevelEmphasis"] = lgle;
  out["GLDM_SmallDependenceEmphasis"] = sde;
  out["GLDM_SmallDependenceHighGrayLevelEmphasis"] = sdh;
  out["GLDM_SmallDependenceLowGrayLevelEmphasis"] = sdl;
}

// ---- GLRLM -------------------------------------------------------------

void glrlm(const ImageGrid& img, const std::vector<Pixel>& px, int ng,
           std::map<std::string, double>& out) {
  // Rebuild a level lookup.
  std::vector<int> grid(static_cast<size_t>(img.width) * img.height, 0);
  for (const Pixel& p : px) grid[static_cast<size_t>(p.y) * img.width + p.x] = p.level;
  auto at = [&](int x, int y) {
    if (x < 0 || x >= img.width || y < 0 || y >= img.height) return 0;
    return grid[static_cast<size_t>(y) * img.width + x];
  };

  const int dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  double np = static_cast<double>(px.size());
  std::map<std::string, double> sum;
  for (auto& dir : dirs) {
    // Walk every scan line for this direction, collecting maximal runs.
    std::vector<std::pair<int, int>> runs;  // (level, length)
    int max_len = 1;
    for (int sy = 0; sy < img.height; ++sy) {
      for (int sx = 0; sx < img.width; ++sx) {
        // (sx, sy) must be a line start: the previous cell is off-grid.
        int bx = sx - dir[0], by = sy - dir[1];
        if (bx >= 0 && bx < img.width && by >= 0 && by < img.height) continue;
        int cur_level = 0, cur_len = 0;
        for (int x = sx, y = sy; x >= 0 && x < img.width && y >= 0 && y < img.height;
             x += dir[0], y += dir[1]) {
          int lvl = at(x, y);
          if (lvl == cur_level && lvl != 0) {
            ++cur_len;
          } else {
            if (cur_level != 0) {
              runs.emplace_back(cur_level, cur_len);
              max_len = std::max(max_len, cur_len);
            }
            cur_level = lvl;
            cur_len = lvl != 0 ? 1 : 0;
          }
        }
        if (cur_level != 0) {
          runs.emplace_back(cur_level, cur_len);
          max_len = std::max(max_len, cur_len);
        }
      }
    }

    std::vector<std::vector<double>> P(ng, std::vector<double>(max_len, 0.0));
    for (auto [lvl, len] : runs) P[lvl - 1][len - 1] += 1.0;
    double nr = static_cast<double>(runs.size());

    std::map<std::string, double> f;
    double sre = 0, lre = 0, gln = 0, rln = 0, mu_i = 0, mu_r = 0, re = 0;
    double lgl = 0, hgl = 0, srl = 0, srh = 0, lrl = 0, lrh = 0;
    for (int i = 0; i < ng; ++i) {
      double rowsum = std::accumulate(P[i].begin(), P[i].end(), 0.0);
      gln += rowsum * rowsum;
      for (int r = 0; r < max_len; ++r) {
        double pij = P[i][r] / nr;
        double gi = i + 1.0, rl = r + 1.0;
        sre += pij / (rl * rl);
        lre += pij * rl * rl;
        mu_i += pij * gi;
        mu_r += pij * rl;
        if (pij > 0) re -= pij * std::log2(pij);
        lgl += pij / (gi * gi);
        hgl += pij * gi * gi;
        srl += pij / (gi * gi * rl * rl);
        srh += pij * gi * gi / (rl * rl);
        lrl += pij * rl * rl / (gi * gi);
        lrh += pij * gi * gi * rl * rl;
      }
    }
    for (int r = 0; r < max_len; ++r) {
      double colsum = 0;
      for (int i = 0; i < ng; ++i) colsum += P[i][r];
      rln += colsum * colsum;
    }
    double glv = 0, rv = 0;
    for (int i = 0; i < ng; ++i)
      for (int r = 0; r < max_len; ++r) {
        double pij = P[i][r] / nr;
        glv += pij * std::pow(i + 1.0 - mu_i, 2.0);
        rv += pij * std::pow(r + 1.0 - mu_r, 2.0);
      }
    f["GrayLevelNonUniformity"] = gln / nr;
    f["GrayLevelNonUniformityNormalized"] = gln / (nr * nr);
    f["GrayLevelVariance"] = glv;
    f["HighGrayLevelRunEmphasis"] = hgl;
    f["LongRunEmphasis"] = lre;
    f["LongRunHighGrayLevelEmphasis"] = lrh;
    f["LongRunLowGrayLevelEmphasis"] = lrl;
    f["LowGrayLevelRunEmphasis"] = lgl;
    f["RunEntropy"] = re;
    f["RunLengthNonUniformity"] = rln / nr;
    f["RunLengthNonUniformityNormalized"] = rln / (nr * nr);
    f["RunPercentage"] = nr / np;
    f["RunVariance"] = rv;
    f["ShortRunEmphasis"] = sre;
    f["ShortRunHighGrayLevelEmphasis"] = srh;
    f["ShortRunLowGrayLevelEmphasis"] = srl;
    for (auto& [k, v] : f) sum[k] += v;
  }
  for (auto& [k, v] : sum) out["GLRLM_" + k] = v / 4.0;
}

// ---- GLSZM -------------------------------------------------------------

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

void glszm(const ImageGrid& img, const std::vector<Pixel>& px, int ng,
           std::map<std::string, double>& out) {
  std::vector<int> grid(static_cast<size_t>(img.width) * img.height, 0);
  for (const Pixel& p : px) grid[static_cast<size_t>(p.y) * img.width + p.x] = p.level;

  UnionFind uf(grid.size());
  for (const Pixel& p : px) {
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        int nx = p.x + dx, ny = p.y + dy;
        if (nx < 0 || nx >= img.width || ny < 0 || ny >= img.height) continue;
        size_t a = static_cast<size_t>(p.y) * img.width + p.x;
        size_t b = static_cast<size_t>(ny) * img.width + nx;
        if (grid[b] == p.level) uf.unite(static_cast<int>(a), static_cast<int>(b));
      }
  }
  std::map<int, std::pair<int, int>> zones;  // root -> (level, size)
  for (const Pixel& p : px) {
    int root = uf.find(static_cast<int>(static_cast<size_t>(p.y) * img.width + p.x));
    auto& z = zones[root];
    z.first = p.level;
    z.second += 1;
  }
  int max_size = 1;
  for (auto& [_, z] : zones) max_size = std::max(max_size, z.second);
  std::vector<std::vector<double>> P(ng, std::vector<double>(max_size, 0.0));
  for (auto& [_, z] : zones) P[z.first - 1][z.second - 1] += 1.0;
  double nz = static_cast<double>(zones.size());
  double np = static_cast<double>(px.size());

  double sae = 0, lae = 0, gln = 0, szn = 0, mu_i = 0, mu_s = 0, ze = 0;
  double lgl = 0, hgl = 0, sal = 0, sah = 0, lal = 0, lah = 0;
  for (int i = 0; i < ng; ++i) {
    double rowsum = std::accumulate(P[i].begin(), P[i].end(), 0.0);
    gln += rowsum * rowsum;
    for (int s = 0; s < max_size; ++s) {
      double pij = P[i][s] / nz;
      double gi = i + 1.0, zs = s + 1.0;
      sae += pij / (zs * zs);
      lae += pij * zs * zs;
      mu_i += pij * gi;
      mu_s += pij * zs;
      if (pij > 0) ze -= pij * std::log2(pij);
      lgl += pij / (gi * gi);
      hgl += pij * gi * gi;
      sal += pij / (gi * gi * zs * zs);
      sah += pij * gi * gi / (zs * zs);
      lal += pij * zs * zs / (gi * gi);
      lah += pij * gi * gi * zs * zs;
    }
  }
  for (int s = 0; s < max_size; ++s) {
    double colsum = 0;
    for (int i = 0; i < ng; ++i) colsum += P[i][s];
    szn += colsum * colsum;
  }
  double glv = 0, zv = 0;
  for (int i = 0; i < ng; ++i)
    for (int s = 0; s < max_size; ++s) {
      double pij = P[i][s] / nz;
      glv += pij * std::pow(i + 1.0 - mu_i, 2.0);
      zv += pij * std::pow(s + 1.0 - mu_s, 2.0);
    }

  out["GLSZM_GrayLevelNonUniformity"] = gln / nz;
  out["GLSZM_GrayLevelNonUniformityNormalized"] = gln / (nz * nz);
  out["GLSZM_GrayLevelVariance"] = glv;
  out["GLSZM_HighGrayLevelZoneEmphasis"] = hgl;
  out["GLSZM_LargeAreaEmphasis"] = lae;
  out["GLSZM_LargeAreaHighGrayLevelEmphasis"] = lah;
  out["GLSZM_LargeAreaLowGrayLevelEmphasis"] = lal;
  out["GLSZM_LowGrayLevelZoneEmphasis"] = lgl;
  out["GLSZM_SizeZoneNonUniformity"] = szn / nz;
  out["GLSZM_SizeZoneNonUniformityNormalized"] = szn / (nz * nz);
  out["GLSZM_SmallAreaEmphasis"] = sae;
  out["GLSZM_SmallAreaHighGrayLevelEmphasis"] = sah;
  out["GLSZM_SmallAreaLowGrayLevelEmphasis"] = sal;
  out["GLSZM_ZoneEntropy"] = ze;
  out["GLSZM_ZonePercentage"] = nz / np;
  out["GLSZM_ZoneVariance"] = zv;
}

// ---- NGTDM -------------------------------------------------------------

void ngtdm(const std::vector<Pixel>& px, int ng, double cap, std::map<std::string, double>& out) {
  std::vector<double> n(ng, 0.0), s(ng, 0.0);
  for (const Pixel& a : px) {
    double sum = 0;
    int cnt = 0;
    for (const Pixel& b : px) {
      if (std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)) == 1) {
        sum += b.level;
        ++cnt;
      }
    }
    if (cnt == 0) continue;
    n[a.level - 1] += 1.0;
    s[a.level - 1] += std::abs(a.level - sum / cnt);
  }
  double nvp = std::accumulate(n.begin(), n.end(), 0.0);
  std::vector<double> p(ng, 0.0);
  for (int i = 0; i < ng; ++i) p[i] = nvp > 0 ? n[i] / nvp : 0.0;
  std::vector<int> occ;
  for (int i = 0; i < ng; ++i)
    if (p[i] > 0) occ.push_back(i);
  double ngp = static_cast<double>(occ.size());

  double ps = 0, ssum = 0;
  for (int i = 0; i < ng; ++i) {
    ps += p[i] * s[i];
    ssum += s[i];
  }

  out["NGTDM_Coarseness"] = ps != 0 ? 1.0 / ps : cap;
  double contrast = 0;
  if (ngp > 1) {
    double a = 0;
    for (int i : occ)
      for (int j : occ) a += p[i] * p[j] * std::pow(static_cast<double>(i - j), 2.0);
    contrast = a / (ngp * (ngp - 1.0)) * (ssum / nvp);
  }
  out["NGTDM_Contrast"] = contrast;
  double busy_den = 0;
  for (int i : occ)
    for (int j : occ) busy_den += std::abs((i + 1.0) * p[i] - (j + 1.0) * p[j]);
  out["NGTDM_Busyness"] = busy_den != 0 ? ps / busy_den : 0.0;
  double cplx = 0;
  if (ngp > 1) {
    for (int i : occ)
      for (int j : occ)
        cplx += std::abs(static_cast<double>(i - j)) * (p[i] * s[i] + p[j] * s[j]) / (p[i] + p[j]);
    cplx /= nvp;
  }
  out["NGTDM_Complexity"] = cplx;
  double strength = 0;
  if (ssum != 0) {
    double a = 0;
    for (int i : occ)
      for (int j : occ) a += (p[i] + p[j]) * std::pow(static_cast<double>(i - j), 2.0);
    strength = a / ssum;
  }
  out["NGTDM_Strength"] = strength;
}

}  // namespace

std::map<std::string, double> extract_all_bruteforce(const ImageGrid& img, const BinaryMask& mask,
                                                     double bin_width, double coarseness_cap) {
  double roi_min = 1e300;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (mask.at(x, y)) roi_min = std::min(roi_min, img.at(x, y));

  std::vector<Pixel> px;
  int ng = 0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (mask.at(x, y)) {
        int lvl = static_cast<int>(std::floor((img.at(x, y) - roi_min) / bin_width)) + 1;
        lvl = std::max(lvl, 1);
        px.push_back({x, y, lvl});
        ng = std::max(ng, lvl);
      }

  std::map<std::string, double> out;
  first_order(img, px, ng, out);
  glcm(px, ng, out);
  gldm(px, ng, out);
  glrlm(img, px, ng, out);
  glszm(img, px, ng, out);
  ngtdm(px, ng, coarseness_cap, out);
  return out;
}

}  // namespace oracle
