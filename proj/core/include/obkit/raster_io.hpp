#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "obkit/raster.hpp"

namespace obkit::io {

using Bytes = std::vector<std::uint8_t>;

// OBFMAP01 float map: 8-byte magic "OBFMAP01", width and height as uint32
// little-endian, then width*height IEEE-754 float32 little-endian, row-major.
// The container holds any float raster (depth maps use it too); range checks
// belong to the caller.
inline constexpr char kFloatMapMagic[8] = {'O', 'B', 'F', 'M', 'A', 'P', '0', '1'};

Bytes encode_float_map(const Raster<float>& map);
Raster<float> decode_float_map(std::span<const std::uint8_t> bytes);
void write_float_map(const std::filesystem::path& path, const Raster<float>& map);
Raster<float> read_float_map(const std::filesystem::path& path);

// Masks are 8-bit single-channel PNG with values {0,255}.
Bytes encode_mask(const BinaryMap& mask);
BinaryMap decode_mask(std::span<const std::uint8_t> bytes);
void write_mask(const std::filesystem::path& path, const BinaryMap& mask);
/// Rejects pixel values other than 0 and 255.
BinaryMap read_mask(const std::filesystem::path& path);

/// 8-bit gray PNG holding arbitrary byte values (label images).
void write_gray(const std::filesystem::path& path, const Raster<std::uint8_t>& img);
Raster<std::uint8_t> read_gray(const std::filesystem::path& path);

/// Any raster format the codec understands (PNG, JPEG, PPM, ...), converted to RGB.
RgbImage decode_rgb(std::span<const std::uint8_t> bytes);
RgbImage read_rgb(const std::filesystem::path& path);
void write_rgb(const std::filesystem::path& path, const RgbImage& img);
Bytes encode_rgb_png(const RgbImage& img);

Bytes read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames it into place.
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace obkit::io
