#pragma once

#include <stdexcept>

namespace thyro {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numeric range precondition failed (lo >= hi, non-positive target, ...).
struct InvalidRangeError : Error { using Error::Error; };
// Degenerate input: constant image, zero variance, no valid pixel pairs.
struct DegenerateError : Error { using Error::Error; };
// ROI-consuming operation received an empty mask.
struct EmptyRoiError : Error { using Error::Error; };
// Paired image/mask geometries do not match.
struct GeometryError : Error { using Error::Error; };
// Random sampling precondition failed (empty foreground/background).
struct SamplingError : Error { using Error::Error; };
// A callback or serialized artifact violated its declared contract.
struct ContractError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };

}  // namespace thyro
