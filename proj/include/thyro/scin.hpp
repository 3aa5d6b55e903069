#pragma once

#include <filesystem>
#include <string>

#include "thyro/grid.hpp"

namespace thyro {

/// SCIN on-disk format: a JSON header `<case>.json` with fields
///   {"width", "height", "spacing_mm": [sx, sy], "dtype": "u16"|"f32"|"u8",
///    "data": "<path relative to the header>"}
/// plus a raw little-endian row-major payload. Masks use dtype u8 with
/// values restricted to {0,1}. Readers reject payloads whose byte length
/// does not equal width*height*dtype-size.

enum class ScinDtype { U8, U16, F32 };

ImageGrid read_scin_image(const std::filesystem::path& header_path);
BinaryMask read_scin_mask(const std::filesystem::path& header_path);

/// Writes `<header_path>` and a sibling `.raw` payload. u16 requires every
/// pixel to be an integer in [0, 65535]; f32 narrows to float.
void write_scin_image(const std::filesystem::path& header_path, const ImageGrid& img,
                      ScinDtype dtype);
void write_scin_mask(const std::filesystem::path& header_path, const BinaryMask& mask);

}  // namespace thyro
