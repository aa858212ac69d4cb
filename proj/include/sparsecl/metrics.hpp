#pragma once
// Standard depth-estimation metrics over valid ground-truth pixels.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>

#include "sparsecl/depth_map.hpp"
#include "sparsecl/simd/kernels.hpp"

namespace sparsecl {

struct MetricReport {
  double delta1 = 0, delta2 = 0, delta3 = 0;  // fraction with max(d/p, p/d) < 1.25^j
  double abs_rel = 0;                         // mean |d - p| / d
  double sq_rel = 0;                          // mean (d - p)^2 / d
  double rms = 0;                             // sqrt(mean (d - p)^2)
  double rms_log = 0;                         // sqrt(mean (ln d - ln p)^2)
  std::size_t n_valid = 0;
};

/// Full-scale reference numbers (KITTI, 42.6M-parameter model). Documentation
/// only; not reachable with the toy trainer.
inline constexpr MetricReport kPublishedFullScale{0.940, 0.990, 0.997, 0.070, 0.294, 2.923, 0.111, 0};

/// Evaluation window; off by default.
struct CropRect {
  std::size_t top = 0, left = 0, height = 0, width = 0;
};

/// Pools raw sums so several samples merge exactly (count-weighted).
class MetricAccumulator {
 public:
  /// Predictions are clamped to [kMinDepth, kMaxDepth] first. Throws
  /// ShapeError on size mismatch or a crop outside the raster, DataError for
  /// non-finite predictions.
  void add(const DepthMap& gt, std::span<const double> pred, std::optional<CropRect> crop = std::nullopt);

  const simd::MetricSums& sums() const noexcept { return sums_; }
  /// Throws EmptyEvaluationError when no valid pixel was seen.
  MetricReport report() const;

 private:
  simd::MetricSums sums_;
};

MetricReport evaluate(const DepthMap& gt, std::span<const double> pred, std::optional<CropRect> crop = std::nullopt);
MetricReport evaluate(const DepthMap& gt, const DepthMap& pred, std::optional<CropRect> crop = std::nullopt);

/// Header "delta1,delta2,delta3,abs_rel,sq_rel,rms,rms_log,n_valid".
void write_metrics_csv_header(std::ostream& out);
void write_metrics_csv_row(std::ostream& out, const MetricReport& r);

}  // namespace sparsecl
