#pragma once

#include "wabe/core/image.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace wabe {

/// round(clamp(v, 0, 1) * 255) with halves rounded up, so 0.5 maps to 128.
std::uint8_t quantize_channel(double v);

/// Binary PPM (P6, maxval 255).
std::string encode_ppm(const ImageBuffer& image);
/// Throws wabe::Error naming `origin` and the byte offset of the problem.
ImageBuffer decode_ppm(std::string_view bytes, const std::string& origin = "<memory>");

void write_image(const ImageBuffer& image, const std::filesystem::path& path);
ImageBuffer read_image(const std::filesystem::path& path);

}  // namespace wabe
