#pragma once
// Analytic street-like scenes with a LiDAR-style random validity mask. The
// dense scene depth is kept alongside the sparse map as an evaluation oracle.

#include <cstdint>
#include <string>

#include "sparsecl/dataset.hpp"
#include "sparsecl/depth_map.hpp"

namespace sparsecl {

enum class DepthModel { planar_ground, spheres, ridges };

DepthModel parse_depth_model(const std::string& name);
std::string to_string(DepthModel m);

struct SyntheticSpec {
  std::size_t height = 64;
  std::size_t width = 128;
  double density = 0.25;
  std::uint64_t scene_seed = 0;
  DepthModel depth_model = DepthModel::planar_ground;
};

struct SyntheticSample {
  SampleRecord record;  // sparse ground truth + rendered RGB
  DepthMap dense;       // pre-mask scene depth, every pixel valid
};

/// Pure function of `spec`. Throws ConfigError when density is outside (0, 1]
/// or the raster is empty.
SyntheticSample generate_synthetic(const SyntheticSpec& spec);

/// `count` samples with seeds base.scene_seed, base.scene_seed + 1, ...; ids
/// "synth_00000", ... Dense references are included.
Dataset generate_synthetic_dataset(const SyntheticSpec& base, std::size_t count);

}  // namespace sparsecl
