#include "thyro/scin.hpp"

#include <cmath>
#include <cstring>

#include <json.hpp>

#include "thyro/util.hpp"

namespace thyro {

namespace {

using nlohmann::json;

struct Header {
  int width = 0;
  int height = 0;
  double sx = 0.0, sy = 0.0;
  std::string dtype;
  std::filesystem::path data_path;  // resolved
};

size_t dtype_size(const std::string& dtype) {
  if (dtype == "u8") return 1;
  if (dtype == "u16") return 2;
  if (dtype == "f32") return 4;
  throw SchemaError("schema error: unknown SCIN dtype '" + dtype + "'");
}

Header read_header(const std::filesystem::path& header_path) {
  json j;
  try {
    j = json::parse(read_file(header_path));
  } catch (const json::exception& e) {
    throw SchemaError("schema error: " + header_path.string() + ": " + e.what());
  }
  Header h;
  try {
    h.width = j.at("width").get<int>();
    h.height = j.at("height").get<int>();
    auto sp = j.at("spacing_mm");
    if (!sp.is_array() || sp.size() != 2)
      throw SchemaError("schema error: spacing_mm must be [sx, sy]");
    h.sx = sp[0].get<double>();
    h.sy = sp[1].get<double>();
    h.dtype = j.at("dtype").get<std::string>();
    h.data_path = header_path.parent_path() / j.at("data").get<std::string>();
  } catch (const json::exception& e) {
    throw SchemaError("schema error: " + header_path.string() + ": " + e.what());
  }
  if (h.width <= 0 || h.height <= 0 || h.sx <= 0.0 || h.sy <= 0.0)
    throw SchemaError("schema error: " + header_path.string() + ": non-positive geometry");
  dtype_size(h.dtype);
  return h;
}

std::string read_payload(const Header& h) {
  std::string bytes = read_file(h.data_path);
  size_t expected = static_cast<size_t>(h.width) * h.height * dtype_size(h.dtype);
  if (bytes.size() != expected)
    throw SchemaError("schema error: " + h.data_path.string() + ": payload is " +
                      std::to_string(bytes.size()) + " bytes, expected " +
                      std::to_string(expected));
  return bytes;
}

void write_header(const std::filesystem::path& header_path, int w, int h, double sx, double sy,
                  const std::string& dtype, const std::string& data_name) {
  json j;
  j["width"] = w;
  j["height"] = h;
  j["spacing_mm"] = {sx, sy};
  j["dtype"] = dtype;
  j["data"] = data_name;
  atomic_write_file(header_path, j.dump(2) + "\n");
}

std::filesystem::path payload_path_for(const std::filesystem::path& header_path) {
  std::filesystem::path p = header_path;
  p.replace_extension(".raw");
  return p;
}

}  // namespace

ImageGrid read_scin_image(const std::filesystem::path& header_path) {
  Header h = read_header(header_path);
  std::string bytes = read_payload(h);
  ImageGrid img;
  img.width = h.width;
  img.height = h.height;
  img.spacing_x = h.sx;
  img.spacing_y = h.sy;
  size_t n = static_cast<size_t>(h.width) * h.height;
  img.pixels.resize(n);
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data());
  if (h.dtype == "u8") {
    for (size_t i = 0; i < n; ++i) img.pixels[i] = raw[i];
  } else if (h.dtype == "u16") {
    for (size_t i = 0; i < n; ++i)
      img.pixels[i] = static_cast<double>(raw[2 * i] | (raw[2 * i + 1] << 8));
  } else {  // f32
    for (size_t i = 0; i < n; ++i) {
      uint32_t bits = static_cast<uint32_t>(raw[4 * i]) | (static_cast<uint32_t>(raw[4 * i + 1]) << 8) |
                      (static_cast<uint32_t>(raw[4 * i + 2]) << 16) |
                      (static_cast<uint32_t>(raw[4 * i + 3]) << 24);
      float f;
      std::memcpy(&f, &bits, 4);
      img.pixels[i] = static_cast<double>(f);
    }
  }
  validate(img);
  return img;
}

BinaryMask read_scin_mask(const std::filesystem::path& header_path) {
  Header h = read_header(header_path);
  if (h.dtype != "u8")
    throw SchemaError("schema error: mask " + header_path.string() + " must use dtype u8");
  std::string bytes = read_payload(h);
  BinaryMask m;
  m.width = h.width;
  m.height = h.height;
  m.spacing_x = h.sx;
  m.spacing_y = h.sy;
  size_t n = static_cast<size_t>(h.width) * h.height;
  m.values.resize(n);
  for (size_t i = 0; i < n; ++i) {
    unsigned char v = static_cast<unsigned char>(bytes[i]);
    if (v > 1)
      throw SchemaError("schema error: mask " + header_path.string() + " has value " +
                        std::to_string(v));
    m.values[i] = v;
  }
  validate(m);
  return m;
}

void write_scin_image(const std::filesystem::path& header_path, const ImageGrid& img,
                      ScinDtype dtype) {
  validate(img);
  std::filesystem::path payload = payload_path_for(header_path);
  std::string bytes;
  std::string dtype_name;
  size_t n = img.pixels.size();
  if (dtype == ScinDtype::U8 || dtype == ScinDtype::U16) {
    bool u8 = dtype == ScinDtype::U8;
    dtype_name = u8 ? "u8" : "u16";
    double maxval = u8 ? 255.0 : 65535.0;
    bytes.resize(n * (u8 ? 1 : 2));
    for (size_t i = 0; i < n; ++i) {
      double v = img.pixels[i];
      if (v < 0.0 || v > maxval || v != std::floor(v))
        throw ContractError(dtype_name + " payload requires integer pixels in [0, " +
                            std::to_string(static_cast<int>(maxval)) + "]");
      auto iv = static_cast<uint32_t>(v);
      if (u8) {
        bytes[i] = static_cast<char>(iv);
      } else {
        bytes[2 * i] = static_cast<char>(iv & 0xff);
        bytes[2 * i + 1] = static_cast<char>((iv >> 8) & 0xff);
      }
    }
  } else {
    dtype_name = "f32";
    bytes.resize(n * 4);
    for (size_t i = 0; i < n; ++i) {
      float f = static_cast<float>(img.pixels[i]);
      uint32_t bits;
      std::memcpy(&bits, &f, 4);
      bytes[4 * i] = static_cast<char>(bits & 0xff);
      bytes[4 * i + 1] = static_cast<char>((bits >> 8) & 0xff);
      bytes[4 * i + 2] = static_cast<char>((bits >> 16) & 0xff);
      bytes[4 * i + 3] = static_cast<char>((bits >> 24) & 0xff);
    }
  }
  atomic_write_file(payload, bytes);
  write_header(header_path, img.width, img.height, img.spacing_x, img.spacing_y, dtype_name,
               payload.filename().string());
}

void write_scin_mask(const std::filesystem::path& header_path, const BinaryMask& mask) {
  validate(mask);
  std::filesystem::path payload = payload_path_for(header_path);
  std::string bytes(mask.values.size(), '\0');
  for (size_t i = 0; i < mask.values.size(); ++i) bytes[i] = static_cast<char>(mask.values[i]);
  atomic_write_file(payload, bytes);
  write_header(header_path, mask.width, mask.height, mask.spacing_x, mask.spacing_y, "u8",
               payload.filename().string());
}

}  // namespace thyro
