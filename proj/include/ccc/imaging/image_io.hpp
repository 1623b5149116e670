#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ccc/imaging/image.hpp"

namespace ccc {

/// Decodes any format the codec layer understands; grayscale and
/// palette inputs are expanded to three channels. Throws Io on failure.
ImageRGB read_image(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const ImageRGB& img);
/// Mask stored as an 8-bit grayscale PNG (0 / 255).
void write_mask_png(const std::filesystem::path& path, const BinaryMask& m);
BinaryMask read_mask_png(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const ImageRGB& img);

}  // namespace ccc
