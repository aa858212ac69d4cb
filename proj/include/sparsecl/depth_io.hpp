#pragma once
// 16-bit depth PNG (meters = raw / 256, raw 0 = missing) and 8-bit RGB PNG I/O.

#include <filesystem>

#include "sparsecl/depth_map.hpp"

namespace sparsecl {

inline constexpr double kDepthPngScale = 256.0;

/// Throws DataError for a missing/unreadable file and FormatError when the PNG
/// is not 16-bit single-channel (the message names the offending property).
DepthMap load_depth_png(const std::filesystem::path& path);

/// Values are rounded to the nearest 1/256 m; invalid pixels are written as 0.
void save_depth_png(const DepthMap& map, const std::filesystem::path& path);

/// Accepts 8-bit RGB or RGBA (alpha dropped).
RgbImage load_rgb_png(const std::filesystem::path& path);
void save_rgb_png(const RgbImage& image, const std::filesystem::path& path);

}  // namespace sparsecl
