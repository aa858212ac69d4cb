#pragma once
// Paired geometric augmentation of an RGB image and its depth target.

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>

#include "sparsecl/depth_map.hpp"

namespace sparsecl {

struct AugmentConfig {
  double flip_probability = 0.5;
  double max_rotation_deg = 0.0;        // uniform in [-max, max]
  std::optional<TargetSize> crop;       // random crop of this size
  std::uint64_t seed = 0;
};

/// Draws of one augmentation; exposed so tests can apply fixed transforms.
struct AugmentDraw {
  bool flip = false;
  double rotation_deg = 0.0;
  std::size_t crop_top = 0, crop_left = 0;
};

/// Deterministic per (config.seed, sample id, epoch).
AugmentDraw draw_augmentation(const AugmentConfig& config, TargetSize raster, std::string_view sample_id,
                              std::size_t epoch);

/// Applies crop, then flip, then rotation about the centre. Both rasters use
/// nearest-neighbour sampling, so depth validity is never blended; pixels
/// rotated in from outside are 0 (invalid depth, black image).
/// Throws ShapeError when the crop exceeds the raster or the pair differs in size.
std::pair<RgbImage, DepthMap> apply_augmentation(const RgbImage& image, const DepthMap& gt, const AugmentDraw& draw,
                                                 std::optional<TargetSize> crop);

std::pair<RgbImage, DepthMap> augment(const RgbImage& image, const DepthMap& gt, const AugmentConfig& config,
                                      std::string_view sample_id, std::size_t epoch);

/// Mirror left-right.
DepthMap flip_horizontal(const DepthMap& map);
RgbImage flip_horizontal(const RgbImage& image);

}  // namespace sparsecl
