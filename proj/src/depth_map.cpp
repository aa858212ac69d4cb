#include "sparsecl/depth_map.hpp"

#include <cmath>
#include <sstream>

#include "sparsecl/errors.hpp"
#include "sparsecl/simd/kernels.hpp"

namespace sparsecl {

std::string to_string(TargetSize s) {
  return std::to_string(s.height) + "x" + std::to_string(s.width);
}

TargetSize parse_target_size(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos || x == 0 || x + 1 == text.size())
    throw ConfigError("target size must look like HxW, got '" + text + "'");
  try {
    std::size_t used_h = 0, used_w = 0;
    const auto h = std::stoul(text.substr(0, x), &used_h);
    const auto w = std::stoul(text.substr(x + 1), &used_w);
    if (used_h != x || used_w != text.size() - x - 1) throw std::invalid_argument("trailing");
    return {h, w};
  } catch (const std::logic_error&) {
    throw ConfigError("target size must look like HxW, got '" + text + "'");
  }
}

DepthMap::DepthMap(std::size_t height, std::size_t width, std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
  if (height_ == 0 || width_ == 0) throw ShapeError("depth map must be at least 1x1");
  if (values_.size() != height_ * width_) {
    std::ostringstream os;
    os << "depth map data has " << values_.size() << " values, expected " << height_ << "x"
       << width_;
    throw ShapeError(os.str());
  }
  for (double& v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw DataError("depth values must be finite and non-negative");
    if (v < kMinDepth) v = 0.0;
    else if (v > kMaxDepth) v = kMaxDepth;
  }
}

DepthMap DepthMap::zeros(std::size_t height, std::size_t width) {
  return DepthMap(height, width, std::vector<double>(height * width, 0.0));
}

DepthMap DepthMap::filled(std::size_t height, std::size_t width, double value) {
  return DepthMap(height, width, std::vector<double>(height * width, value));
}

std::size_t count_valid(const DepthMap& map) {
  const auto v = map.values();
  return simd::active_kernels().count_valid(v.data(), v.size(), kMinDepth);
}

double density(const DepthMap& map) {
  return static_cast<double>(count_valid(map)) / static_cast<double>(map.pixel_count());
}

}  // namespace sparsecl
