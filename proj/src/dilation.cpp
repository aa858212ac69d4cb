#include "sparsecl/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "sparsecl/errors.hpp"
#include "sparsecl/simd/kernels.hpp"

namespace sparsecl {

std::optional<TargetSize> iterated_pool_size(TargetSize input, std::size_t iterations,
                                             std::size_t kernel) {
  if (iterations > 0 && kernel == 0) return std::nullopt;
  TargetSize s = input;
  for (std::size_t i = 0; i < iterations; ++i) {
    s = {s.height / kernel, s.width / kernel};
    if (s.height == 0 || s.width == 0) return std::nullopt;
  }
  return s;
}

SyllabusSpec make_syllabus(TargetSize target, std::size_t iterations, std::size_t kernel) {
  if (iterations == 0) return identity_syllabus(target);
  const auto pooled = iterated_pool_size(target, iterations, kernel);
  if (!pooled) {
    std::ostringstream os;
    os << iterations << " pooling step(s) with kernel " << kernel << " collapse " << to_string(target)
       << " below 1x1";
    throw DegeneratePoolError(os.str());
  }
  return {iterations, kernel, *pooled};
}

namespace {

using RowKernel = void (*)(const double*, std::size_t, std::size_t, std::size_t, std::size_t, double*);

DepthMap pool(const DepthMap& map, PoolParams p, RowKernel row_kernel) {
  if (p.kernel_h == 0 || p.kernel_w == 0 || p.kernel_h > map.height() || p.kernel_w > map.width()) {
    std::ostringstream os;
    os << "pool kernel " << p.kernel_h << "x" << p.kernel_w << " does not fit a "
       << to_string(map.size()) << " raster";
    throw DegeneratePoolError(os.str());
  }
  const std::size_t out_h = map.height() / p.kernel_h;
  const std::size_t out_w = map.width() / p.kernel_w;
  std::vector<double> out(out_h * out_w);
  const double* src = map.values().data();
  for (std::size_t i = 0; i < out_h; ++i)
    row_kernel(src + i * p.kernel_h * map.width(), map.width(), p.kernel_h, p.kernel_w, out_w,
               out.data() + i * out_w);
  return DepthMap(out_h, out_w, std::move(out));
}

// Source index for output index i under the half-pixel nearest rule, in exact
// integer arithmetic.
inline std::size_t nearest_source(std::size_t i, std::size_t in, std::size_t out) {
  const std::size_t s = ((2 * i + 1) * in) / (2 * out);
  return s < in ? s : in - 1;
}

std::vector<std::size_t> nearest_table(std::size_t in, std::size_t out) {
  std::vector<std::size_t> t(out);
  for (std::size_t i = 0; i < out; ++i) t[i] = nearest_source(i, in, out);
  return t;
}

}  // namespace

DepthMap max_pool2d(const DepthMap& map, PoolParams params) {
  return pool(map, params, simd::active_kernels().max_pool_row);
}

DepthMap mean_pool2d(const DepthMap& map, PoolParams params) {
  return pool(map, params, simd::active_kernels().mean_pool_row);
}

DepthMap gaussian_blur(const DepthMap& map, double sigma, std::size_t radius) {
  if (!(sigma > 0.0)) throw ConfigError("gaussian sigma must be positive");
  std::vector<double> taps(2 * radius + 1);
  double total = 0.0;
  for (std::size_t k = 0; k < taps.size(); ++k) {
    const double x = static_cast<double>(k) - static_cast<double>(radius);
    taps[k] = std::exp(-0.5 * x * x / (sigma * sigma));
    total += taps[k];
  }
  for (double& t : taps) t /= total;

  const std::size_t h = map.height(), w = map.width();
  const auto clamp_index = [](std::ptrdiff_t i, std::size_t n) {
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1));
  };
  const auto r = static_cast<std::ptrdiff_t>(radius);
  std::vector<double> tmp(h * w), out(h * w);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      double s = 0.0;
      for (std::ptrdiff_t k = -r; k <= r; ++k)
        s += taps[k + r] * map.at(y, clamp_index(static_cast<std::ptrdiff_t>(x) + k, w));
      tmp[y * w + x] = s;
    }
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      double s = 0.0;
      for (std::ptrdiff_t k = -r; k <= r; ++k)
        s += taps[k + r] * tmp[clamp_index(static_cast<std::ptrdiff_t>(y) + k, h) * w + x];
      out[y * w + x] = s;
    }
  return DepthMap(h, w, std::move(out));
}

DepthMap resize_nearest(const DepthMap& map, TargetSize size) {
  if (size.height == 0 || size.width == 0) throw ShapeError("resize target must be at least 1x1");
  if (size == map.size()) return map;
  const auto rows = nearest_table(map.height(), size.height);
  const auto cols = nearest_table(map.width(), size.width);
  std::vector<double> out(size.area());
  for (std::size_t i = 0; i < size.height; ++i) {
    const auto src = map.row(rows[i]);
    double* dst = out.data() + i * size.width;
    for (std::size_t j = 0; j < size.width; ++j) dst[j] = src[cols[j]];
  }
  return DepthMap(size.height, size.width, std::move(out));
}

RgbImage resize_nearest(const RgbImage& image, TargetSize size) {
  if (size.height == 0 || size.width == 0) throw ShapeError("resize target must be at least 1x1");
  if (size.height == image.height && size.width == image.width) return image;
  const auto rows = nearest_table(image.height, size.height);
  const auto cols = nearest_table(image.width, size.width);
  RgbImage out(size.height, size.width);
  for (std::size_t ch = 0; ch < 3; ++ch)
    for (std::size_t i = 0; i < size.height; ++i)
      for (std::size_t j = 0; j < size.width; ++j) out.at(ch, i, j) = image.at(ch, rows[i], cols[j]);
  return out;
}

DepthMap dilate(const DepthMap& map, const SyllabusSpec& syllabus, TargetSize size) {
  return impute(map, syllabus, size, ImputationMethod::max);
}

DepthMap impute(const DepthMap& map, const SyllabusSpec& syllabus, TargetSize size,
                ImputationMethod method) {
  if (syllabus.is_identity()) return resize_nearest(map, size);
  const PoolParams params{syllabus.kernel, syllabus.kernel};
  if (method == ImputationMethod::gaussian) {
    if (!iterated_pool_size(map.size(), syllabus.iterations, syllabus.kernel))
      throw DegeneratePoolError("syllabus collapses " + to_string(map.size()) + " below 1x1");
    const double sigma = std::pow(static_cast<double>(syllabus.kernel),
                                  static_cast<double>(syllabus.iterations)) / 2.0;
    return resize_nearest(gaussian_blur(map, sigma, static_cast<std::size_t>(std::ceil(3.0 * sigma))), size);
  }
  DepthMap cur = map;
  for (std::size_t i = 0; i < syllabus.iterations; ++i)
    cur = method == ImputationMethod::max ? max_pool2d(cur, params) : mean_pool2d(cur, params);
  return resize_nearest(cur, size);
}

}  // namespace sparsecl
