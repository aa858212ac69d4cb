#pragma once
// Depth rasters with zero-encoded invalid pixels.

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sparsecl {

/// Smallest depth (meters) treated as a measurement; anything below is missing.
inline constexpr double kMinDepth = 1e-3;
/// Far clamp applied on ingest (meters).
inline constexpr double kMaxDepth = 80.0;

inline constexpr bool is_valid_depth(double v) noexcept { return v >= kMinDepth; }

struct TargetSize {
  std::size_t height = 0;
  std::size_t width = 0;

  constexpr std::size_t area() const noexcept { return height * width; }
  friend constexpr auto operator<=>(const TargetSize&, const TargetSize&) = default;
};

/// "256x512" style.
std::string to_string(TargetSize s);
/// Parses "HxW"; throws ConfigError.
TargetSize parse_target_size(const std::string& text);

/// Row-major depth raster in meters.
///
/// Construction canonicalizes values: anything below kMinDepth becomes exactly
/// 0 (invalid), anything above kMaxDepth is clamped to kMaxDepth. Negative or
/// non-finite input is rejected. Instances are immutable.
class DepthMap {
 public:
  DepthMap(std::size_t height, std::size_t width, std::vector<double> values);

  static DepthMap zeros(std::size_t height, std::size_t width);
  static DepthMap filled(std::size_t height, std::size_t width, double value);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  TargetSize size() const noexcept { return {height_, width_}; }
  std::size_t pixel_count() const noexcept { return values_.size(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {values_.data() + r * width_, width_};
  }
  double at(std::size_t r, std::size_t c) const noexcept { return values_[r * width_ + c]; }
  bool valid(std::size_t r, std::size_t c) const noexcept { return is_valid_depth(at(r, c)); }

  friend bool operator==(const DepthMap&, const DepthMap&) = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<double> values_;
};

std::size_t count_valid(const DepthMap& map);

/// Fraction of valid pixels.
double density(const DepthMap& map);

/// Planar RGB raster, channel-major (3 x height x width), values in [0, 1].
struct RgbImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> data;

  RgbImage() = default;
  RgbImage(std::size_t h, std::size_t w) : height(h), width(w), data(3 * h * w, 0.0) {}

  double& at(std::size_t ch, std::size_t r, std::size_t c) { return data[(ch * height + r) * width + c]; }
  double at(std::size_t ch, std::size_t r, std::size_t c) const {
    return data[(ch * height + r) * width + c];
  }
  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

struct SampleRecord {
  std::string id;
  std::optional<RgbImage> image;
  DepthMap ground_truth;
};

}  // namespace sparsecl
