// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "glassforge/image.hpp"

namespace glassforge {

enum class ImageFormat { png, jpeg, radiance_hdr, unknown };

/// Sniffs the format from the leading bytes, not the extension.
ImageFormat detect_format(const std::filesystem::path& path);

SrgbImage read_png(const std::filesystem::path& path);
SrgbImage read_jpeg(const std::filesystem::path& path);
/// Radiance RGBE (flat or new-style RLE scanlines), -Y H +X W orientation.
/// Texel value = mantissa / 256 * 2^(exponent - 128); exponent 0 is black.
LinearImage read_hdr(const std::filesystem::path& path);

/// PNG/JPEG are decoded to sRGB and linearized; HDR is returned as stored.
LinearImage load_image(const std::filesystem::path& path);

/// 8-bit RGB PNG, no ancillary chunks, so output bytes depend only on pixels.
void write_png(const std::filesystem::path& path, const SrgbImage& img);

/// Debug dump: int32 width, int32 height (little endian), then row-major
/// float32 RGB.
void write_raw(const std::filesystem::path& path, const LinearImage& img);
LinearImage read_raw(const std::filesystem::path& path);

}  // namespace glassforge
