#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "sparsecl/curriculum.hpp"
#include "sparsecl/dilation.hpp"
#include "sparsecl/errors.hpp"
#include "sparsecl/synthetic.hpp"

using namespace sparsecl;

namespace {

DepthMap from_grid(const oracle::Grid& g) { return DepthMap(g.h, g.w, g.v); }

std::vector<double> to_vec(const DepthMap& m) { return {m.values().begin(), m.values().end()}; }

// Means of mostly-zero windows can fall below the validity threshold, which
// the raster type stores as exact zeros.
std::vector<double> canonical(std::vector<double> v) {
  for (double& x : v) x = x < 1e-3 ? 0.0 : x;
  return v;
}

}  // namespace

TEST_CASE("max_pool2d hand example") {
  const DepthMap in(4, 4, {1, 0, 3, 2, 0, 5, 0, 1, 2, 0, 0, 0, 0, 1, 4, 0});
  const DepthMap out = max_pool2d(in, {2, 2});
  CHECK(out == DepthMap(2, 2, {5, 3, 2, 4}));
}

TEST_CASE("max_pool2d output sizes on 256x512") {
  DepthMap m = DepthMap::filled(256, 512, 1.0);
  for (int i = 0; i < 4; ++i) m = max_pool2d(m, {3, 3});
  CHECK(m.size() == TargetSize{3, 6});
  CHECK(max_pool2d(DepthMap::filled(256, 512, 1.0), {37, 37}).size() == TargetSize{6, 13});
}

TEST_CASE("max_pool2d floor semantics and degenerate kernels") {
  const DepthMap in(3, 5, {1, 2, 3, 4, 50, 6, 7, 8, 9, 10, 70, 70, 70, 70, 70});
  const DepthMap out = max_pool2d(in, {2, 2});
  CHECK(out == DepthMap(1, 2, {7, 9}));  // last row and column dropped
  CHECK_THROWS_AS(max_pool2d(in, {4, 2}), DegeneratePoolError);
  CHECK_THROWS_AS(max_pool2d(in, {1, 6}), DegeneratePoolError);
  CHECK_THROWS_AS(max_pool2d(in, {0, 1}), DegeneratePoolError);
}

TEST_CASE("window validity: a pooled cell is valid iff its window had a valid pixel") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 50; ++t) {
    const auto g = oracle::random_grid(rng, 20, 24, 0.9);
    const DepthMap in = from_grid(g), out = max_pool2d(in, {4, 3});
    for (std::size_t i = 0; i < out.height(); ++i)
      for (std::size_t j = 0; j < out.width(); ++j) {
        bool any = false;
        for (std::size_t a = 0; a < 4; ++a)
          for (std::size_t b = 0; b < 3; ++b) any = any || in.valid(i * 4 + a, j * 3 + b);
        REQUIRE(out.valid(i, j) == any);
      }
  }
}

TEST_CASE("iterated pooling uses iterated floor division") {
  // Adversarial sizes where the chain collapses or loses remainders at each step.
  for (std::size_t h : {7u, 26u, 80u, 81u, 255u, 256u})
    for (std::size_t k : {2u, 3u, 5u})
      for (std::size_t it = 1; it <= 4; ++it) {
        std::size_t eh = h, ew = h + 3;
        bool ok = true;
        for (std::size_t s = 0; s < it; ++s) {
          eh /= k;
          ew /= k;
          ok = ok && eh > 0 && ew > 0;
        }
        const auto got = iterated_pool_size({h, h + 3}, it, k);
        if (!ok) {
          CHECK_FALSE(got.has_value());
          continue;
        }
        REQUIRE(got.has_value());
        CHECK(*got == TargetSize{eh, ew});
        DepthMap m = DepthMap::filled(h, h + 3, 1.0);
        for (std::size_t s = 0; s < it; ++s) m = max_pool2d(m, {k, k});
        CHECK(m.size() == *got);
      }
}

TEST_CASE("mean_pool2d includes zeros") {
  CHECK(mean_pool2d(DepthMap(2, 2, {0, 0, 0, 8}), {2, 2}) == DepthMap(1, 1, {2.0}));
  CHECK(mean_pool2d(DepthMap::filled(6, 6, 7.5), {3, 2}) == DepthMap::filled(2, 3, 7.5));
  const DepthMap in(4, 4, {1, 0, 3, 2, 0, 5, 0, 1, 2, 0, 0, 0, 0, 1, 4, 0});
  CHECK(mean_pool2d(in, {2, 2}) == DepthMap(2, 2, {1.5, 1.5, 0.75, 1.0}));
  CHECK_THROWS_AS(mean_pool2d(in, {5, 1}), DegeneratePoolError);
}

TEST_CASE("gaussian_blur") {
  CHECK_THROWS_AS(gaussian_blur(DepthMap::filled(4, 4, 1.0), 0.0, 2), ConfigError);
  const DepthMap flat = gaussian_blur(DepthMap::filled(5, 7, 3.0), 1.5, 4);
  for (double v : flat.values()) CHECK(v == doctest::Approx(3.0));
  // A lone valid pixel spreads into neighbours and its peak drops.
  std::vector<double> v(9 * 9, 0.0);
  v[4 * 9 + 4] = 40.0;
  const DepthMap blurred = gaussian_blur(DepthMap(9, 9, v), 1.0, 3);
  CHECK(blurred.at(4, 4) < 40.0);
  CHECK(blurred.valid(4, 5));
  CHECK(blurred.at(4, 3) == doctest::Approx(blurred.at(4, 5)));
}

TEST_CASE("resize_nearest") {
  const DepthMap in(2, 2, {1, 2, 3, 4});
  CHECK(resize_nearest(in, {2, 2}) == in);
  CHECK(resize_nearest(in, {4, 4}) == DepthMap(4, 4, {1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4}));

  std::mt19937_64 rng(3);
  const auto g = oracle::random_grid(rng, 3, 6, 0.5);
  const DepthMap up = resize_nearest(from_grid(g), {256, 512});
  const std::set<double> source(g.v.begin(), g.v.end());
  for (double x : up.values()) REQUIRE(source.count(x) == 1);
  CHECK(to_vec(up) == oracle::resize_nearest(g, 256, 512).v);
}

TEST_CASE("dilate") {
  const auto sample = generate_synthetic({256, 512, 0.25, 3, DepthModel::planar_ground});
  const DepthMap& gt = sample.record.ground_truth;

  SUBCASE("identity syllabus leaves the map untouched") {
    const auto& identity = canonical_catalog_256x512()[30].syllabus;
    CHECK(dilate(gt, identity, gt.size()) == gt);
  }
  SUBCASE("coarsest syllabus fills everything when both cells see data") {
    const auto& s = canonical_catalog_256x512()[0].syllabus;  // 8 x (2,2) -> 1x2
    CHECK(density(dilate(gt, s, gt.size())) == 1.0);
    std::vector<double> left_only(256 * 512, 0.0);
    left_only[10] = 5.0;  // only the left 256x256 half has data
    CHECK(density(dilate(DepthMap(256, 512, left_only), s, {256, 512})) == 0.5);
  }
  SUBCASE("4 x (3,3) densifies a 25% map") {
    const auto& s = canonical_catalog_256x512()[2].syllabus;
    CHECK(density(dilate(gt, s, gt.size())) >= 0.99);
  }
  SUBCASE("degenerate chain propagates") {
    CHECK_THROWS_AS(dilate(DepthMap::filled(4, 4, 1.0), SyllabusSpec{3, 2, {0, 0}}, {4, 4}), DegeneratePoolError);
  }
  SUBCASE("imputation variants") {
    const auto& s = canonical_catalog_256x512()[28].syllabus;  // 1 x (3,3)
    const DepthMap mx = impute(gt, s, gt.size(), ImputationMethod::max);
    const DepthMap mean = impute(gt, s, gt.size(), ImputationMethod::mean);
    CHECK(mx == dilate(gt, s, gt.size()));
    CHECK(density(mean) == doctest::Approx(density(mx)));
    for (std::size_t i = 0; i < mx.pixel_count(); ++i) REQUIRE(mean.values()[i] <= mx.values()[i]);
    const DepthMap gauss = impute(gt, s, gt.size(), ImputationMethod::gaussian);
    CHECK(density(gauss) > density(gt));
  }
}

TEST_CASE("pooling and resize match brute force on random rasters") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> dim(1, 32);
  for (int t = 0; t < 200; ++t) {
    const std::size_t h = dim(rng), w = dim(rng);
    const auto g = oracle::random_grid(rng, h, w, 0.6);
    const DepthMap m = from_grid(g);
    const std::size_t kh = std::uniform_int_distribution<std::size_t>(1, h)(rng);
    const std::size_t kw = std::uniform_int_distribution<std::size_t>(1, w)(rng);
    REQUIRE(to_vec(max_pool2d(m, {kh, kw})) == oracle::max_pool(g, kh, kw).v);
    REQUIRE(to_vec(mean_pool2d(m, {kh, kw})) == canonical(oracle::mean_pool(g, kh, kw).v));
    const std::size_t oh = dim(rng), ow = dim(rng);
    REQUIRE(to_vec(resize_nearest(m, {oh, ow})) == oracle::resize_nearest(g, oh, ow).v);
  }
}
