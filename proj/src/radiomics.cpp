#include "thyro/radiomics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "thyro/resample.hpp"

namespace thyro {

namespace {

const std::vector<std::string> kFoNames = {
    "10Percentile", "90Percentile", "Energy", "Entropy", "InterquartileRange", "Kurtosis",
    "Maximum", "Mean", "MeanAbsoluteDeviation", "Median", "Minimum", "Range",
    "RobustMeanAbsoluteDeviation", "RootMeanSquared", "Skewness", "TotalEnergy", "Uniformity",
    "Variance"};

const std::vector<std::string> kGlcmNames = {
    "Autocorrelation", "ClusterProminence", "ClusterShade", "ClusterTendency", "Contrast",
    "Correlation", "DifferenceAverage", "DifferenceEntropy", "DifferenceVariance", "Id", "Idm",
    "Idmn", "Idn", "Imc1", "Imc2", "InverseVariance", "JointAverage", "JointEnergy",
    "JointEntropy", "MCC", "MaximumProbability", "SumAverage", "SumEntropy", "SumSquares"};

const std::vector<std::string> kGldmNames = {
    "DependenceEntropy", "DependenceNonUniformity", "DependenceNonUniformityNormalized",
    "DependenceVariance", "GrayLevelNonUniformity", "GrayLevelVariance", "HighGrayLevelEmphasis",
    "LargeDependenceEmphasis", "LargeDependenceHighGrayLevelEmphasis",
    "LargeDependenceLowGrayLevelEmphasis", "LowGrayLevelEmphasis", "SmallDependenceEmphasis",
    "SmallDependenceHighGrayLevelEmphasis", "SmallDependenceLowGrayLevelEmphasis"};

const std::vector<std::string> kGlrlmNames = {
    "GrayLevelNonUniformity", "GrayLevelNonUniformityNormalized", "GrayLevelVariance",
    "HighGrayLevelRunEmphasis", "LongRunEmphasis", "LongRunHighGrayLevelEmphasis",
    "LongRunLowGrayLevelEmphasis", "LowGrayLevelRunEmphasis", "RunEntropy",
    "RunLengthNonUniformity", "RunLengthNonUniformityNormalized", "RunPercentage", "RunVariance",
    "ShortRunEmphasis", "ShortRunHighGrayLevelEmphasis", "ShortRunLowGrayLevelEmphasis"};

const std::vector<std::string> kGlszmNames = {
    "GrayLevelNonUniformity", "GrayLevelNonUniformityNormalized", "GrayLevelVariance",
    "HighGrayLevelZoneEmphasis", "LargeAreaEmphasis", "LargeAreaHighGrayLevelEmphasis",
    "LargeAreaLowGrayLevelEmphasis", "LowGrayLevelZoneEmphasis", "SizeZoneNonUniformity",
    "SizeZoneNonUniformityNormalized", "SmallAreaEmphasis", "SmallAreaHighGrayLevelEmphasis",
    "SmallAreaLowGrayLevelEmphasis", "ZoneEntropy", "ZonePercentage", "ZoneVariance"};

const std::vector<std::string> kNgtdmNames = {"Busyness", "Coarseness", "Complexity", "Contrast",
                                              "Strength"};

std::vector<double> in_name_order(const std::map<std::string, double>& values,
                                  const std::vector<std::string>& names) {
  std::vector<double> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(values.at(n));
  return out;
}

double log2_safe(double p) { return std::log2(p); }

/// Linear interpolation between order statistics; `sorted` ascending.
double percentile(const std::vector<double>& sorted, double q) {
  double rank = q / 100.0 * static_cast<double>(sorted.size() - 1);
  size_t lo = static_cast<size_t>(std::floor(rank));
  double frac = rank - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// Eigenvalues of a symmetric n x n matrix by cyclic Jacobi rotations.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n) {
  auto at = [&](int i, int j) -> double& { return a[static_cast<size_t>(i) * n + j]; };
  for (int sweep = 0; sweep < 128; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-28) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = at(i, i);
  return eig;
}

std::map<std::string, double> glcm_features_one(const TextureMatrix& P) {
  const int ng = P.rows;
  std::vector<double> px(ng, 0.0), py(ng, 0.0);
  for (int i = 0; i < ng; ++i)
    for (int j = 0; j < ng; ++j) {
      px[i] += P.at(i, j);
      py[j] += P.at(i, j);
    }

  double mux = 0.0, muy = 0.0;
  for (int i = 0; i < ng; ++i) {
    mux += (i + 1.0) * px[i];
    muy += (i + 1.0) * py[i];
  }
  double sigx2 = 0.0, sigy2 = 0.0;
  for (int i = 0; i < ng; ++i) {
    sigx2 += px[i] * (i + 1.0 - mux) * (i + 1.0 - mux);
    sigy2 += py[i] * (i + 1.0 - muy) * (i + 1.0 - muy);
  }

  std::vector<double> psum(2 * ng + 1, 0.0);   // index k = i + j, 2..2Ng
  std::vector<double> pdiff(ng, 0.0);          // index k = |i - j|, 0..Ng-1
  for (int i = 0; i < ng; ++i)
    for (int j = 0; j < ng; ++j) {
      psum[i + j + 2] += P.at(i, j);
      pdiff[std::abs(i - j)] += P.at(i, j);
    }

  double autoc = 0.0, prom = 0.0, shade = 0.0, tend = 0.0, contrast = 0.0, ss = 0.0;
  double joint_energy = 0.0, hxy = 0.0, maxp = 0.0, hxy1 = 0.0, hxy2 = 0.0;
  for (int i = 0; i < ng; ++i) {
    for (int j = 0; j < ng; ++j) {
      double p = P.at(i, j);
      double li = i + 1.0, lj = j + 1.0;
      double cdev = li + lj - mux - muy;
      autoc += li * lj * p;
      prom += cdev * cdev * cdev * cdev * p;
      shade += cdev * cdev * cdev * p;
      tend += cdev * cdev * p;
      contrast += (li - lj) * (li - lj) * p;
      ss += (li - mux) * (li - mux) * p;
      joint_energy += p * p;
      maxp = std::max(maxp, p);
      if (p > 0.0) {
        hxy -= p * log2_safe(p);
        hxy1 -= p * log2_safe(px[i] * py[j]);
      }
      double q = px[i] * py[j];
      if (q > 0.0) hxy2 -= q * log2_safe(q);
    }
  }

  double hx = 0.0, hy = 0.0;
  for (int i = 0; i < ng; ++i) {
    if (px[i] > 0.0) hx -= px[i] * log2_safe(px[i]);
    if (py[i] > 0.0) hy -= py[i] * log2_safe(py[i]);
  }

  double da = 0.0, de = 0.0, id = 0.0, idm = 0.0, idmn = 0.0, idn = 0.0, invvar = 0.0;
  for (int k = 0; k < ng; ++k) {
    double p = pdiff[k];
    da += k * p;
    if (p > 0.0) de -= p * log2_safe(p);
    id += p / (1.0 + k);
    idm += p / (1.0 + static_cast<double>(k) * k);
    idmn += p / (1.0 + static_cast<double>(k) * k / (static_cast<double>(ng) * ng));
    idn += p / (1.0 + static_cast<double>(k) / ng);
    if (k >= 1) invvar += p / (static_cast<double>(k) * k);
  }
  double dv = 0.0;
  for (int k = 0; k < ng; ++k) dv += (k - da) * (k - da) * pdiff[k];

  double sa = 0.0, se = 0.0;
  for (int k = 2; k <= 2 * ng; ++k) {
    sa += k * psum[k];
    if (psum[k] > 0.0) se -= psum[k] * log2_safe(psum[k]);
  }

  // Correlation degenerates to 1 when either marginal variance is 0.
  double denom = std::sqrt(sigx2 * sigy2);
  double correlation = denom > 0.0 ? (autoc - mux * muy) / denom : 1.0;

  double hmax = std::max(hx, hy);
  double imc1 = hmax > 0.0 ? (hxy - hxy1) / hmax : 0.0;
  double imc2 = std::sqrt(1.0 - std::exp(-2.0 * std::max(0.0, hxy2 - hxy)));

  // MCC: sqrt of the second largest eigenvalue of Q(i,j) =
  // sum_k p(i,k)p(j,k)/(px(i)py(k)). Q is similar to the symmetric
  // S = D^-1/2 M D^-1/2 with D = diag(px), M(i,j) = sum_k p(i,k)p(j,k)/py(k),
  // restricted to occupied levels.
  std::vector<int> occ;
  for (int i = 0; i < ng; ++i)
    if (px[i] > 0.0) occ.push_back(i);
  double mcc = 1.0;
  if (occ.size() >= 2) {
    int n = static_cast<int>(occ.size());
    std::vector<double> S(static_cast<size_t>(n) * n, 0.0);
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        double m = 0.0;
        for (int c = 0; c < n; ++c) {
          double pyk = py[occ[c]];
          if (pyk > 0.0) m += P.at(occ[a], occ[c]) * P.at(occ[b], occ[c]) / pyk;
        }
        double s = m / std::sqrt(px[occ[a]] * px[occ[b]]);
        S[static_cast<size_t>(a) * n + b] = s;
        S[static_cast<size_t>(b) * n + a] = s;
      }
    }
    std::vector<double> eig = symmetric_eigenvalues(std::move(S), n);
    std::sort(eig.begin(), eig.end(), std::greater<>());
    mcc = std::sqrt(std::min(1.0, std::max(0.0, eig[1])));
  }

  return {
      {"Autocorrelation", autoc},
      {"ClusterProminence", prom},
      {"ClusterShade", shade},
      {"ClusterTendency", tend},
      {"Contrast", contrast},
      {"Correlation", correlation},
      {"DifferenceAverage", da},
      {"DifferenceEntropy", de},
      {"DifferenceVariance", dv},
      {"Id", id},
      {"Idm", idm},
      {"Idmn", idmn},
      {"Idn", idn},
      {"Imc1", imc1},
      {"Imc2", imc2},
      {"InverseVariance", invvar},
      {"JointAverage", mux},
      {"JointEnergy", joint_energy},
      {"JointEntropy", hxy},
      {"MCC", mcc},
      {"MaximumProbability", maxp},
      {"SumAverage", sa},
      {"SumEntropy", se},
      {"SumSquares", ss},
  };
}

}  // namespace

const std::vector<std::string>& fo_feature_names() { return kFoNames; }
const std::vector<std::string>& glcm_feature_names() { return kGlcmNames; }
const std::vector<std::string>& gldm_feature_names() { return kGldmNames; }
const std::vector<std::string>& glrlm_feature_names() { return kGlrlmNames; }
const std::vector<std::string>& glszm_feature_names() { return kGlszmNames; }
const std::vector<std::string>& ngtdm_feature_names() { return kNgtdmNames; }

const std::vector<std::string>& canonical_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> all;
    auto add = [&all](const char* family, const std::vector<std::string>& bare) {
      for (const auto& n : bare) all.push_back(std::string(family) + "_" + n);
    };
    add("FO", kFoNames);
    add("GLCM", kGlcmNames);
    add("GLDM", kGldmNames);
    add("GLRLM", kGlrlmNames);
    add("GLSZM", kGlszmNames);
    add("NGTDM", kNgtdmNames);
    return all;
  }();
  return names;
}

std::vector<double> first_order_features(const ImageGrid& img, const BinaryMask& mask,
                                         double bin_width) {
  std::vector<double> vals = roi_values(img, mask);
  if (vals.empty()) throw EmptyRoiError("first_order: empty mask");
  const double n = static_cast<double>(vals.size());

  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0, energy = 0.0, mad = 0.0;
  for (double v : vals) {
    double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
    energy += v * v;
    mad += std::abs(d);
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  mad /= n;
  if (m2 == 0.0)
    throw DegenerateError("first_order: zero-variance ROI, skewness/kurtosis undefined");

  std::vector<double> sorted = vals;
  std::sort(sorted.begin(), sorted.end());
  double p10 = percentile(sorted, 10.0);
  double p90 = percentile(sorted, 90.0);

  // Robust MAD: deviation about the mean of values within [P10, P90].
  double rsum = 0.0;
  size_t rcount = 0;
  for (double v : sorted)
    if (v >= p10 && v <= p90) {
      rsum += v;
      ++rcount;
    }
  double rmad = 0.0;
  if (rcount > 0) {
    double rmean = rsum / static_cast<double>(rcount);
    for (double v : sorted)
      if (v >= p10 && v <= p90) rmad += std::abs(v - rmean);
    rmad /= static_cast<double>(rcount);
  }

  // Entropy and Uniformity operate on the discretized histogram.
  DiscretizedRoi roi = discretize_roi(img, mask, bin_width);
  std::vector<double> hist(roi.ng, 0.0);
  for (const RoiEntry& e : roi.entries) hist[e.level - 1] += 1.0;
  double entropy = 0.0, uniformity = 0.0;
  for (double c : hist) {
    if (c == 0.0) continue;
    double p = c / n;
    entropy -= p * log2_safe(p);
    uniformity += p * p;
  }

  std::map<std::string, double> f = {
      {"10Percentile", p10},
      {"90Percentile", p90},
      {"Energy", energy},
      {"Entropy", entropy},
      {"InterquartileRange", percentile(sorted, 75.0) - percentile(sorted, 25.0)},
      {"Kurtosis", m4 / (m2 * m2)},
      {"Maximum", sorted.back()},
      {"Mean", mean},
      {"MeanAbsoluteDeviation", mad},
      {"Median", percentile(sorted, 50.0)},
      {"Minimum", sorted.front()},
      {"Range", sorted.back() - sorted.front()},
      {"RobustMeanAbsoluteDeviation", rmad},
      {"RootMeanSquared", std::sqrt(energy / n)},
      {"Skewness", m3 / (m2 * std::sqrt(m2))},
      {"TotalEnergy", img.spacing_x * img.spacing_y * energy},
      {"Uniformity", uniformity},
      {"Variance", m2},
  };
  return in_name_order(f, kFoNames);
}

std::vector<double> glcm_features(const std::vector<TextureMatrix>& per_direction) {
  std::vector<double> mean(kGlcmNames.size(), 0.0);
  int used = 0;
  for (const TextureMatrix& P : per_direction) {
    if (P.rows == 0) continue;  // direction without valid pairs
    auto f = glcm_features_one(P);
    for (size_t k = 0; k < kGlcmNames.size(); ++k) mean[k] += f.at(kGlcmNames[k]);
    ++used;
  }
  if (used == 0) throw DegenerateError("glcm_features: all directions degenerate");
  for (double& v : mean) v /= used;
  return mean;
}

std::vector<double> gldm_features(const DiscretizedRoi& roi) {
  TextureMatrix C = gldm_matrix(roi);
  double nz = C.sum();
  double sde = 0.0, lde = 0.0, glv_mu = 0.0, dv_mu = 0.0, de = 0.0;
  double lgle = 0.0, hgle = 0.0, sdlgle = 0.0, sdhgle = 0.0, ldlgle = 0.0, ldhgle = 0.0;
  for (int r = 0; r < C.rows; ++r) {
    double i = r + 1.0;
    for (int c = 0; c < C.cols; ++c) {
      double cnt = C.at(r, c);
      if (cnt == 0.0) continue;
      double j = c + 1.0;  // dependence d = c, feature value j = d + 1
      double p = cnt / nz;
      sde += p / (j * j);
      lde += p * j * j;
      glv_mu += p * i;
      dv_mu += p * j;
      de -= p * log2_safe(p);
      lgle += p / (i * i);
      hgle += p * i * i;
      sdlgle += p / (i * i * j * j);
      sdhgle += p * i * i / (j * j);
      ldlgle += p * j * j / (i * i);
      ldhgle += p * i * i * j * j;
    }
  }
  double glv = 0.0, dv = 0.0, gln = 0.0, dn = 0.0;
  for (int r = 0; r < C.rows; ++r) {
    double rowsum = 0.0;
    for (int c = 0; c < C.cols; ++c) rowsum += C.at(r, c);
    gln += rowsum * rowsum;
    double i = r + 1.0;
    for (int c = 0; c < C.cols; ++c) {
      double p = C.at(r, c) / nz;
      double j = c + 1.0;
      glv += p * (i - glv_mu) * (i - glv_mu);
      dv += p * (j - dv_mu) * (j - dv_mu);
    }
  }
  for (int c = 0; c < C.cols; ++c) {
    double colsum = 0.0;
    for (int r = 0; r < C.rows; ++r) colsum += C.at(r, c);
    dn += colsum * colsum;
  }

  std::map<std::string, double> f = {
      {"DependenceEntropy", de},
      {"DependenceNonUniformity", dn / nz},
      {"DependenceNonUniformityNormalized", dn / (nz * nz)},
      {"DependenceVariance", dv},
      {"GrayLevelNonUniformity", gln / nz},
      {"GrayLevelVariance", glv},
      {"HighGrayLevelEmphasis", hgle},
      {"LargeDependenceEmphasis", lde},
      {"LargeDependenceHighGrayLevelEmphasis", ldhgle},
      {"LargeDependenceLowGrayLevelEmphasis", ldlgle},
      {"LowGrayLevelEmphasis", lgle},
      {"SmallDependenceEmphasis", sde},
      {"SmallDependenceHighGrayLevelEmphasis", sdhgle},
      {"SmallDependenceLowGrayLevelEmphasis", sdlgle},
  };
  return in_name_order(f, kGldmNames);
}

namespace {

std::map<std::string, double> glrlm_features_one(const TextureMatrix& C, double np) {
  double nr = C.sum();
  double sre = 0.0, lre = 0.0, mu_i = 0.0, mu_r = 0.0, re = 0.0;
  double lglre = 0.0, hglre = 0.0, srlgle = 0.0, srhgle = 0.0, lrlgle = 0.0, lrhgle = 0.0;
  for (int r = 0; r < C.rows; ++r) {
    double i = r + 1.0;
    for (int c = 0; c < C.cols; ++c) {
      double cnt = C.at(r, c);
      if (cnt == 0.0) continue;
      double len = c + 1.0;
      double p = cnt / nr;
      sre += p / (len * len);
      lre += p * len * len;
      mu_i += p * i;
      mu_r += p * len;
      re -= p * log2_safe(p);
      lglre += p / (i * i);
      hglre += p * i * i;
      srlgle += p / (i * i * len * len);
      srhgle += p * i * i / (len * len);
      lrlgle += p * len * len / (i * i);
      lrhgle += p * i * i * len * len;
    }
  }
  double glv = 0.0, rv = 0.0, gln = 0.0, rln = 0.0;
  for (int r = 0; r < C.rows; ++r) {
    double rowsum = 0.0;
    for (int c = 0; c < C.cols; ++c) rowsum += C.at(r, c);
    gln += rowsum * rowsum;
    double i = r + 1.0;
    for (int c = 0; c < C.cols; ++c) {
      double p = C.at(r, c) / nr;
      double len = c + 1.0;
      glv += p * (i - mu_i) * (i - mu_i);
      rv += p * (len - mu_r) * (len - mu_r);
    }
  }
  for (int c = 0; c < C.cols; ++c) {
    double colsum = 0.0;
    for (int r = 0; r < C.rows; ++r) colsum += C.at(r, c);
    rln += colsum * colsum;
  }
  return {
      {"GrayLevelNonUniformity", gln / nr},
      {"GrayLevelNonUniformityNormalized", gln / (nr * nr)},
      {"GrayLevelVariance", glv},
      {"HighGrayLevelRunEmphasis", hglre},
      {"LongRunEmphasis", lre},
      {"LongRunHighGrayLevelEmphasis", lrhgle},
      {"LongRunLowGrayLevelEmphasis", lrlgle},
      {"LowGrayLevelRunEmphasis", lglre},
      {"RunEntropy", re},
      {"RunLengthNonUniformity", rln / nr},
      {"RunLengthNonUniformityNormalized", rln / (nr * nr)},
      {"RunPercentage", nr / np},
      {"RunVariance", rv},
      {"ShortRunEmphasis", sre},
      {"ShortRunHighGrayLevelEmphasis", srhgle},
      {"ShortRunLowGrayLevelEmphasis", srlgle},
  };
}

}  // namespace

std::vector<double> glrlm_features(const DiscretizedRoi& roi, const ExtractionConfig& cfg) {
  auto matrices = glrlm_matrices(roi, cfg);
  double np = static_cast<double>(roi.entries.size());
  std::vector<double> mean(kGlrlmNames.size(), 0.0);
  for (const TextureMatrix& C : matrices) {
    auto f = glrlm_features_one(C, np);
    for (size_t k = 0; k < kGlrlmNames.size(); ++k) mean[k] += f.at(kGlrlmNames[k]);
  }
  for (double& v : mean) v /= static_cast<double>(matrices.size());
  return mean;
}

std::vector<double> glszm_features(const DiscretizedRoi& roi) {
  TextureMatrix C = glszm_matrix(roi);
  double nz = C.sum();
  double np = static_cast<double>(roi.entries.size());
  double sae = 0.0, lae = 0.0, mu_i = 0.0, mu_s = 0.0, ze = 0.0;
  double lglze = 0.0, hglze = 0.0, salgle = 0.0, sahgle = 0.0, lalgle = 0.0, lahgle = 0.0;
  for (int r = 0; r < C.rows; ++r) {
    double i = r + 1.0;
    for (int c = 0; c < C.cols; ++c) {
      double cnt = C.at(r, c);
      if (cnt == 0.0) continue;
      double s = c + 1.0;
      double p = cnt / nz;
      sae += p / (s * s);
      lae += p * s * s;
      mu_i += p * i;
      mu_s += p * s;
      ze -= p * log2_safe(p);
      lglze += p / (i * i);
      hglze += p * i * i;
      salgle += p / (i * i * s * s);
      sahgle += p * i * i / (s * s);
      lalgle += p * s * s / (i * i);
      lahgle += p * i * i * s * s;
    }
  }
  double glv = 0.0, zv = 0.0, gln = 0.0, szn = 0.0;
  for (int r = 0; r < C.rows; ++r) {
    double rowsum = 0.0;
    for (int c = 0; c < C.cols; ++c) rowsum += C.at(r, c);
    gln += rowsum * rowsum;
    double i = r + 1.0;
    for (int c = 0; c < C.cols; ++c) {
      double p = C.at(r, c) / nz;
      double s = c + 1.0;
      glv += p * (i - mu_i) * (i - mu_i);
      zv += p * (s - mu_s) * (s - mu_s);
    }
  }
  for (int c = 0; c < C.cols; ++c) {
    double colsum = 0.0;
    for (int r = 0; r < C.rows; ++r) colsum += C.at(r, c);
    szn += colsum * colsum;
  }

  std::map<std::string, double> f = {
      {"GrayLevelNonUniformity", gln / nz},
      {"GrayLevelNonUniformityNormalized", gln / (nz * nz)},
      {"GrayLevelVariance", glv},
      {"HighGrayLevelZoneEmphasis", hglze},
      {"LargeAreaEmphasis", lae},
      {"LargeAreaHighGrayLevelEmphasis", lahgle},
      {"LargeAreaLowGrayLevelEmphasis", lalgle},
      {"LowGrayLevelZoneEmphasis", lglze},
      {"SizeZoneNonUniformity", szn / nz},
      {"SizeZoneNonUniformityNormalized", szn / (nz * nz)},
      {"SmallAreaEmphasis", sae},
      {"SmallAreaHighGrayLevelEmphasis", sahgle},
      {"SmallAreaLowGrayLevelEmphasis", salgle},
      {"ZoneEntropy", ze},
      {"ZonePercentage", nz / np},
      {"ZoneVariance", zv},
  };
  return in_name_order(f, kGlszmNames);
}

std::vector<double> ngtdm_features(const DiscretizedRoi& roi, double coarseness_cap) {
  NgtdmData d = ngtdm_data(roi);
  const int ng = roi.ng;
  std::vector<int> occ;
  for (int i = 0; i < ng; ++i)
    if (d.p[i] > 0.0) occ.push_back(i);
  int ngp = static_cast<int>(occ.size());

  double ps_sum = 0.0, s_sum = 0.0;
  for (int i = 0; i < ng; ++i) {
    ps_sum += d.p[i] * d.s[i];
    s_sum += d.s[i];
  }

  double coarseness = ps_sum != 0.0 ? 1.0 / ps_sum : coarseness_cap;

  double contrast = 0.0;
  if (ngp > 1 && d.nvp > 0.0) {
    double acc = 0.0;
    for (int a : occ)
      for (int b : occ) acc += d.p[a] * d.p[b] * (a - b) * (a - b);
    contrast = acc / (static_cast<double>(ngp) * (ngp - 1)) * (s_sum / d.nvp);
  }

  double busyness = 0.0;
  {
    double denom = 0.0;
    for (int a : occ)
      for (int b : occ) denom += std::abs((a + 1.0) * d.p[a] - (b + 1.0) * d.p[b]);
    if (denom != 0.0) busyness = ps_sum / denom;
  }

  double complexity = 0.0;
  if (ngp > 1 && d.nvp > 0.0) {
    for (int a : occ)
      for (int b : occ)
        complexity += std::abs(static_cast<double>(a) - b) *
                      (d.p[a] * d.s[a] + d.p[b] * d.s[b]) / (d.p[a] + d.p[b]);
    complexity /= d.nvp;
  }

  double strength = 0.0;
  if (s_sum != 0.0) {
    double acc = 0.0;
    for (int a : occ)
      for (int b : occ) acc += (d.p[a] + d.p[b]) * (a - b) * (a - b);
    strength = acc / s_sum;
  }

  std::map<std::string, double> f = {
      {"Busyness", busyness},
      {"Coarseness", coarseness},
      {"Complexity", complexity},
      {"Contrast", contrast},
      {"Strength", strength},
  };
  return in_name_order(f, kNgtdmNames);
}

std::vector<double> extract_all(const ImageGrid& img, const BinaryMask& mask,
                                const ExtractionConfig& cfg) {
  if (cfg.bin_width <= 0.0) throw InvalidRangeError("extract_all: bin_width must be positive");
  DiscretizedRoi roi = discretize_roi(img, mask, cfg.bin_width);

  std::vector<double> out;
  out.reserve(kFeatureCount);
  auto append = [&out](const std::vector<double>& vals) {
    out.insert(out.end(), vals.begin(), vals.end());
  };
  append(first_order_features(img, mask, cfg.bin_width));
  append(glcm_features(glcm_matrices(roi, cfg)));
  append(gldm_features(roi));
  append(glrlm_features(roi, cfg));
  append(glszm_features(roi));
  append(ngtdm_features(roi, cfg.coarseness_cap));

  for (double v : out)
    if (!std::isfinite(v)) throw DegenerateError("extract_all: non-finite feature value");
  return out;
}

std::pair<ImageGrid, BinaryMask> preprocess_for_extraction(const ImageGrid& img,
                                                           const BinaryMask& mask) {
  require_same_geometry(img, mask);
  ImageGrid z = zscore_normalize(img);
  ImageGrid rz = resample_to_spacing(z, 1.0, 1.0, Interp::Cubic);
  BinaryMask rm = resample_to_spacing(mask, 1.0, 1.0);
  return {std::move(rz), std::move(rm)};
}

}  // namespace thyro
