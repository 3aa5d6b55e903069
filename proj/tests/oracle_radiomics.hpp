#pragma once

#include <map>
#include <string>

#include "thyro/grid.hpp"

// Brute-force reference extractor, kept deliberately naive and independent
// of the library's texture-matrix machinery: matrices come from quadratic
// pair scans, connected components from union-find, the MCC eigenvalue from
// power iteration with deflation. Used to cross-check every feature value.
namespace oracle {

std::map<std::string, double> extract_all_bruteforce(const thyro::ImageGrid& img,
                                                     const thyro::BinaryMask& mask,
                                                     double bin_width,
                                                     double coarseness_cap = 1e6);

}  // namespace oracle
