#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sparsecl/errors.hpp"
#include "sparsecl/metrics.hpp"

using namespace sparsecl;

namespace {

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(b), 1e-300); }

struct Fixture {
  std::vector<double> gt, pred;
};

Fixture random_fixture(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::lognormal_distribution<double> noise(0.0, 0.25);
  Fixture f;
  for (int i = 0; i < 256; ++i) {
    f.gt.push_back(u(rng) < 0.3 ? 0.0 : 0.5 + 79.0 * u(rng));
    double p = (f.gt.back() > 0 ? f.gt.back() : 10.0) * noise(rng);
    if (i % 37 == 0) p = 150.0;    // above the clamp
    if (i % 41 == 0) p = -3.0;     // below the clamp
    f.pred.push_back(p);
  }
  return f;
}

void check_against_oracle(const MetricReport& r, const oracle::Metrics& o, double tol) {
  CHECK(r.n_valid == o.n);
  CHECK(rel_close(r.delta1, o.d1, tol));
  CHECK(rel_close(r.delta2, o.d2, tol));
  CHECK(rel_close(r.delta3, o.d3, tol));
  CHECK(rel_close(r.abs_rel, o.abs_rel, tol));
  CHECK(rel_close(r.sq_rel, o.sq_rel, tol));
  CHECK(rel_close(r.rms, o.rms, tol));
  CHECK(rel_close(r.rms_log, o.rms_log, tol));
}

}  // namespace

TEST_CASE("hand example") {
  const DepthMap gt(1, 2, {2.0, 4.0});
  const MetricReport r = evaluate(gt, std::vector<double>{2.0, 4.8});
  CHECK(r.rms == doctest::Approx(std::sqrt(0.32)).epsilon(1e-14));
  CHECK(r.abs_rel == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(r.delta1 == 1.0);
  CHECK(r.sq_rel == doctest::Approx(0.64 / 4.0 / 2.0).epsilon(1e-14));
  CHECK(r.rms_log == doctest::Approx(std::log(1.2) / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(r.n_valid == 2);
}

TEST_CASE("identity prediction") {
  std::mt19937_64 rng(4);
  const auto g = oracle::random_grid(rng, 16, 16, 0.4);
  const DepthMap gt(16, 16, g.v);
  const MetricReport r = evaluate(gt, gt);
  CHECK(r.delta1 == 1.0);
  CHECK(r.delta2 == 1.0);
  CHECK(r.delta3 == 1.0);
  CHECK(r.abs_rel == 0.0);
  CHECK(r.sq_rel == 0.0);
  CHECK(r.rms == 0.0);
  CHECK(r.rms_log == 0.0);
}

TEST_CASE("matches the brute-force oracle on random fixtures") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Fixture f = random_fixture(seed);
    const MetricReport r = evaluate(DepthMap(16, 16, f.gt), f.pred);
    check_against_oracle(r, oracle::metrics(f.gt, f.pred), 1e-9);
  }
}

TEST_CASE("thresholds are strict") {
  const DepthMap gt(1, 2, {4.0, 4.0});
  const MetricReport r = evaluate(gt, std::vector<double>{5.0, 4.0 / 1.25});
  CHECK(r.delta1 == 0.0);
  CHECK(r.delta2 == 1.0);
}

TEST_CASE("scale behaviour") {
  const Fixture f = random_fixture(77);
  std::vector<double> gt = f.gt, pred = f.pred;
  for (double& p : pred) p = std::clamp(p, 1.0, 20.0);
  for (double& d : gt) d = d > 0 ? std::clamp(d, 1.0, 20.0) : 0.0;
  const MetricReport a = evaluate(DepthMap(16, 16, gt), pred);
  const double c = 3.5;
  for (double& p : pred) p *= c;
  for (double& d : gt) d *= c;
  const MetricReport b = evaluate(DepthMap(16, 16, gt), pred);
  CHECK(a.delta1 == b.delta1);
  CHECK(a.delta2 == b.delta2);
  CHECK(a.delta3 == b.delta3);
  CHECK(b.abs_rel == doctest::Approx(a.abs_rel).epsilon(1e-12));
  CHECK(b.rms_log == doctest::Approx(a.rms_log).epsilon(1e-12));
  CHECK(b.rms == doctest::Approx(c * a.rms).epsilon(1e-12));
  CHECK(b.sq_rel == doctest::Approx(c * a.sq_rel).epsilon(1e-12));
}

TEST_CASE("invalid pixels are ignored") {
  const Fixture f = random_fixture(5);
  const MetricReport a = evaluate(DepthMap(16, 16, f.gt), f.pred);
  std::vector<double> pred = f.pred;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (f.gt[i] == 0.0) pred[i] = 1e6 * (i % 3);
  const MetricReport b = evaluate(DepthMap(16, 16, f.gt), pred);
  CHECK(a.rms == b.rms);
  CHECK(a.abs_rel == b.abs_rel);
  CHECK(a.delta1 == b.delta1);
  CHECK(a.n_valid == b.n_valid);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(evaluate(DepthMap::zeros(4, 4), std::vector<double>(16, 1.0)), EmptyEvaluationError);
  CHECK_THROWS_AS(evaluate(DepthMap::filled(4, 4, 2.0), std::vector<double>(15, 1.0)), ShapeError);
  std::vector<double> bad(16, 1.0);
  bad[3] = std::nan("");
  CHECK_THROWS_AS(evaluate(DepthMap::filled(4, 4, 2.0), bad), DataError);
  CHECK_THROWS_AS(evaluate(DepthMap::filled(4, 4, 2.0), std::vector<double>(16, 1.0), CropRect{2, 2, 3, 3}),
                  ShapeError);
}

TEST_CASE("crop and accumulation") {
  const Fixture f = random_fixture(9);
  const DepthMap gt(16, 16, f.gt);
  const MetricReport cropped = evaluate(gt, f.pred, CropRect{4, 2, 8, 10});
  std::vector<double> g2, p2;
  for (std::size_t r = 4; r < 12; ++r)
    for (std::size_t c = 2; c < 12; ++c) {
      g2.push_back(f.gt[r * 16 + c]);
      p2.push_back(f.pred[r * 16 + c]);
    }
  check_against_oracle(cropped, oracle::metrics(g2, p2), 1e-9);

  // Two samples pooled equal one concatenated sample.
  const Fixture h = random_fixture(10);
  MetricAccumulator acc;
  acc.add(gt, f.pred);
  acc.add(DepthMap(16, 16, h.gt), h.pred);
  std::vector<double> gg = f.gt, pp = f.pred;
  gg.insert(gg.end(), h.gt.begin(), h.gt.end());
  pp.insert(pp.end(), h.pred.begin(), h.pred.end());
  check_against_oracle(acc.report(), oracle::metrics(gg, pp), 1e-9);
}

TEST_CASE("csv row order") {
  std::ostringstream os;
  write_metrics_csv_header(os);
  write_metrics_csv_row(os, MetricReport{0.5, 0.75, 1.0, 0.1, 0.2, 0.3, 0.4, 7});
  const std::string s = os.str();
  CHECK(s.rfind("delta1,delta2,delta3,abs_rel,sq_rel,rms,rms_log,n_valid\n", 0) == 0);
  CHECK(s.find("\n0.5,0.75,1,0.1") != std::string::npos);
  CHECK(s.substr(s.size() - 3) == ",7\n");
}
