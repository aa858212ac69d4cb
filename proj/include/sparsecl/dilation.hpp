#pragma once
// Valid-aware pooling and nearest-neighbour resizing. Invalid pixels are 0,
// so a max-pooled cell is valid iff its window holds at least one valid pixel.

#include <cstddef>

#include "sparsecl/depth_map.hpp"
#include "sparsecl/syllabus.hpp"

namespace sparsecl {

/// Non-overlapping window (stride = kernel, no padding). Trailing rows and
/// columns not covered by a full window are dropped.
struct PoolParams {
  std::size_t kernel_h = 2;
  std::size_t kernel_w = 2;
};

/// Throws DegeneratePoolError when a kernel side is 0 or exceeds the input.
DepthMap max_pool2d(const DepthMap& map, PoolParams params);

/// Window mean with invalid pixels counted as zeros. Ablation baseline only.
DepthMap mean_pool2d(const DepthMap& map, PoolParams params);

/// Truncated separable Gaussian (taps at offsets -radius..radius, normalized,
/// edge-clamped) at full resolution. Zeros are blended in like any other value.
/// Throws ConfigError for sigma <= 0.
DepthMap gaussian_blur(const DepthMap& map, double sigma, std::size_t radius);

/// out[i,j] = in[floor((i+0.5)*in_h/out_h), floor((j+0.5)*in_w/out_w)].
DepthMap resize_nearest(const DepthMap& map, TargetSize size);
RgbImage resize_nearest(const RgbImage& image, TargetSize size);

/// Max-pool `syllabus.iterations` times, then resize to `size`.
DepthMap dilate(const DepthMap& map, const SyllabusSpec& syllabus, TargetSize size);

enum class ImputationMethod { max, mean, gaussian };

/// dilate() with a selectable imputation. `gaussian` blurs at full resolution
/// with sigma = kernel^iterations / 2 and radius = ceil(3 sigma) instead of
/// pooling, then resizes.
DepthMap impute(const DepthMap& map, const SyllabusSpec& syllabus, TargetSize size,
                ImputationMethod method);

}  // namespace sparsecl
