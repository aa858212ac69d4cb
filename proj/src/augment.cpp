#include "sparsecl/augment.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "sparsecl/errors.hpp"

namespace sparsecl {
namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Maps output (r, c) to the source pixel, or nullopt if outside.
struct Sampler {
  std::size_t h, w;
  bool flip;
  double cos_t, sin_t;
  bool rotate;

  std::optional<std::pair<std::size_t, std::size_t>> operator()(std::size_t r, std::size_t c) const {
    double sr = static_cast<double>(r), sc = static_cast<double>(c);
    if (rotate) {
      const double cy = (static_cast<double>(h) - 1.0) / 2.0, cx = (static_cast<double>(w) - 1.0) / 2.0;
      const double dy = sr - cy, dx = sc - cx;
      sr = std::round(cy + cos_t * dy - sin_t * dx);
      sc = std::round(cx + sin_t * dy + cos_t * dx);
      if (sr < 0 || sc < 0 || sr >= static_cast<double>(h) || sc >= static_cast<double>(w)) return std::nullopt;
    }
    auto ir = static_cast<std::size_t>(sr), ic = static_cast<std::size_t>(sc);
    if (flip) ic = w - 1 - ic;
    return std::pair{ir, ic};
  }
};

}  // namespace

AugmentDraw draw_augmentation(const AugmentConfig& config, TargetSize raster, std::string_view sample_id,
                              std::size_t epoch) {
  std::mt19937_64 rng(fnv1a(sample_id, config.seed * 0x9E3779B97F4A7C15ull + epoch + 1));
  const auto u = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  AugmentDraw d;
  d.flip = u() < config.flip_probability;
  d.rotation_deg = config.max_rotation_deg > 0.0 ? (2.0 * u() - 1.0) * config.max_rotation_deg : 0.0;
  if (config.crop) {
    if (config.crop->height > raster.height || config.crop->width > raster.width)
      throw ShapeError("crop " + to_string(*config.crop) + " exceeds raster " + to_string(raster));
    d.crop_top = static_cast<std::size_t>(u() * static_cast<double>(raster.height - config.crop->height + 1));
    d.crop_left = static_cast<std::size_t>(u() * static_cast<double>(raster.width - config.crop->width + 1));
  }
  return d;
}

std::pair<RgbImage, DepthMap> apply_augmentation(const RgbImage& image, const DepthMap& gt, const AugmentDraw& draw,
                                                 std::optional<TargetSize> crop) {
  if (image.height != gt.height() || image.width != gt.width())
    throw ShapeError("image and ground truth differ in size");
  TargetSize out = gt.size();
  if (crop) {
    if (crop->height == 0 || crop->width == 0 || draw.crop_top + crop->height > gt.height() ||
        draw.crop_left + crop->width > gt.width())
      throw ShapeError("crop " + to_string(*crop) + " exceeds raster " + to_string(gt.size()));
    out = *crop;
  }
  const double theta = draw.rotation_deg * std::numbers::pi / 180.0;
  const Sampler sample{out.height, out.width, draw.flip, std::cos(theta), std::sin(theta), draw.rotation_deg != 0.0};

  RgbImage img(out.height, out.width);
  std::vector<double> depth(out.area(), 0.0);
  for (std::size_t r = 0; r < out.height; ++r)
    for (std::size_t c = 0; c < out.width; ++c) {
      const auto src = sample(r, c);
      if (!src) continue;
      const std::size_t sr = src->first + draw.crop_top, sc = src->second + draw.crop_left;
      depth[r * out.width + c] = gt.at(sr, sc);
      for (std::size_t ch = 0; ch < 3; ++ch) img.at(ch, r, c) = image.at(ch, sr, sc);
    }
  return {std::move(img), DepthMap(out.height, out.width, std::move(depth))};
}

std::pair<RgbImage, DepthMap> augment(const RgbImage& image, const DepthMap& gt, const AugmentConfig& config,
                                      std::string_view sample_id, std::size_t epoch) {
  return apply_augmentation(image, gt, draw_augmentation(config, gt.size(), sample_id, epoch), config.crop);
}

DepthMap flip_horizontal(const DepthMap& map) {
  std::vector<double> out(map.pixel_count());
  for (std::size_t r = 0; r < map.height(); ++r)
    for (std::size_t c = 0; c < map.width(); ++c) out[r * map.width() + c] = map.at(r, map.width() - 1 - c);
  return DepthMap(map.height(), map.width(), std::move(out));
}

RgbImage flip_horizontal(const RgbImage& image) {
  RgbImage out(image.height, image.width);
  for (std::size_t ch = 0; ch < 3; ++ch)
    for (std::size_t r = 0; r < image.height; ++r)
      for (std::size_t c = 0; c < image.width; ++c) out.at(ch, r, c) = image.at(ch, r, image.width - 1 - c);
  return out;
}

}  // namespace sparsecl
