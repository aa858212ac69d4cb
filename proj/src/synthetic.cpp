#include "sparsecl/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#include "sparsecl/errors.hpp"

namespace sparsecl {
namespace {

// std::uniform_real_distribution is implementation-defined; this keeps the
// generator bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

struct Pixel {
  double depth;
  double albedo;
};

struct Box {
  double depth, left, right, top_frac;
  double albedo;
};

struct Sphere {
  double cx, cy, radius_px, depth, albedo;
};

struct Scene {
  std::size_t h, w;
  double horizon;       // row of the vanishing line
  double bottom_depth;  // ground depth at the last row
  double background;    // depth above the horizon
  std::vector<Box> boxes;
  std::vector<Sphere> spheres;
  double ridge_period = 0, ridge_phase = 0, ridge_amp = 0;

  double ground(double row) const {
    if (row <= horizon + 0.5) return background;
    const double d = bottom_depth * (static_cast<double>(h) - horizon) / (row - horizon);
    return std::min(d, background);
  }
  // Image row where the ground reaches depth d.
  double ground_row(double d) const {
    return horizon + bottom_depth * (static_cast<double>(h) - horizon) / d;
  }
};

Scene make_scene(const SyntheticSpec& spec, Rng& rng) {
  Scene s{spec.height, spec.width, 0, 0, 0, {}, {}};
  const double H = static_cast<double>(spec.height), W = static_cast<double>(spec.width);
  s.horizon = H * rng.uniform(0.30, 0.45);
  s.bottom_depth = rng.uniform(2.5, 5.0);
  s.background = rng.uniform(35.0, 80.0);

  const int n_boxes = spec.depth_model == DepthModel::planar_ground ? 4 : 2;
  for (int i = 0; i < n_boxes; ++i) {
    Box b;
    b.depth = rng.uniform(6.0, 30.0);
    const double half = W * rng.uniform(0.04, 0.15) * (10.0 / b.depth);
    const double cx = rng.uniform(0.0, W);
    b.left = cx - half;
    b.right = cx + half;
    b.top_frac = rng.uniform(0.5, 2.0);
    b.albedo = rng.uniform(0.4, 0.9);
    s.boxes.push_back(b);
  }
  if (spec.depth_model == DepthModel::spheres) {
    for (int i = 0; i < 3; ++i) {
      Sphere sp;
      sp.depth = rng.uniform(5.0, 25.0);
      sp.radius_px = H * rng.uniform(0.08, 0.2) * (10.0 / sp.depth);
      sp.cx = rng.uniform(0.0, W);
      sp.cy = s.ground_row(sp.depth) - sp.radius_px;
      sp.albedo = rng.uniform(0.2, 0.7);
      s.spheres.push_back(sp);
    }
  }
  if (spec.depth_model == DepthModel::ridges) {
    s.ridge_period = W * rng.uniform(0.15, 0.4);
    s.ridge_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    s.ridge_amp = rng.uniform(0.1, 0.3);
  }
  return s;
}

Pixel shade(const Scene& s, double row, double col) {
  Pixel p{s.ground(row), row > s.horizon ? 0.35 : 0.15};
  if (s.ridge_period > 0 && row > s.horizon) {
    p.depth *= 1.0 + s.ridge_amp * std::sin(2.0 * std::numbers::pi * col / s.ridge_period + s.ridge_phase);
    p.albedo = 0.3;
  }
  for (const Box& b : s.boxes) {
    const double foot = s.ground_row(b.depth);
    const double top = foot - (foot - s.horizon) * b.top_frac;
    if (col >= b.left && col < b.right && row >= top && row < foot && b.depth < p.depth)
      p = {b.depth, b.albedo};
  }
  for (const Sphere& sp : s.spheres) {
    const double dx = col - sp.cx, dy = row - sp.cy;
    const double r2 = sp.radius_px * sp.radius_px - dx * dx - dy * dy;
    if (r2 <= 0) continue;
    // Radius in meters scales with depth / focal; bulge toward the camera.
    const double bulge = std::sqrt(r2) / sp.radius_px * sp.depth * 0.1;
    const double d = sp.depth - bulge;
    if (d < p.depth) p = {d, sp.albedo};
  }
  p.depth = std::clamp(p.depth, 1.0, kMaxDepth);
  return p;
}

}  // namespace

DepthModel parse_depth_model(const std::string& name) {
  if (name == "planar_ground") return DepthModel::planar_ground;
  if (name == "spheres") return DepthModel::spheres;
  if (name == "ridges") return DepthModel::ridges;
  throw ConfigError("unknown depth model '" + name + "' (planar_ground|spheres|ridges)");
}

std::string to_string(DepthModel m) {
  switch (m) {
    case DepthModel::planar_ground: return "planar_ground";
    case DepthModel::spheres: return "spheres";
    case DepthModel::ridges: return "ridges";
  }
  return "?";
}

SyntheticSample generate_synthetic(const SyntheticSpec& spec) {
  if (!(spec.density > 0.0 && spec.density <= 1.0))
    throw ConfigError("synthetic density must be in (0, 1], got " + std::to_string(spec.density));
  if (spec.height == 0 || spec.width == 0) throw ConfigError("synthetic raster must be at least 1x1");

  Rng scene_rng(mix(spec.scene_seed));
  const Scene scene = make_scene(spec, scene_rng);
  Rng mask_rng(mix(spec.scene_seed ^ 0x5DEECE66Dull));
  Rng texture_rng(mix(spec.scene_seed + 0x632BE59BD9B4E019ull));

  const std::size_t n = spec.height * spec.width;
  std::vector<double> dense(n), sparse(n);
  RgbImage image(spec.height, spec.width);
  const double log_far = std::log1p(kMaxDepth);
  for (std::size_t r = 0; r < spec.height; ++r) {
    for (std::size_t c = 0; c < spec.width; ++c) {
      const Pixel p = shade(scene, static_cast<double>(r) + 0.5, static_cast<double>(c) + 0.5);
      const std::size_t i = r * spec.width + c;
      dense[i] = p.depth;
      sparse[i] = mask_rng.uniform() < spec.density ? p.depth : 0.0;
      const double grain = texture_rng.uniform(-0.05, 0.05);
      image.at(0, r, c) = std::exp(-p.depth / 25.0);
      image.at(1, r, c) = std::clamp(p.albedo + grain, 0.0, 1.0);
      image.at(2, r, c) = std::log1p(p.depth) / log_far;
    }
  }

  char id[32];
  std::snprintf(id, sizeof id, "seed_%llu", static_cast<unsigned long long>(spec.scene_seed));
  return {SampleRecord{id, std::move(image), DepthMap(spec.height, spec.width, std::move(sparse))},
          DepthMap(spec.height, spec.width, std::move(dense))};
}

Dataset generate_synthetic_dataset(const SyntheticSpec& base, std::size_t count) {
  Dataset ds;
  for (std::size_t i = 0; i < count; ++i) {
    SyntheticSpec spec = base;
    spec.scene_seed = base.scene_seed + i;
    SyntheticSample s = generate_synthetic(spec);
    char id[32];
    std::snprintf(id, sizeof id, "synth_%05zu", i);
    s.record.id = id;
    ds.samples.push_back(std::move(s.record));
    ds.dense.push_back(std::move(s.dense));
  }
  return ds;
}

}  // namespace sparsecl
