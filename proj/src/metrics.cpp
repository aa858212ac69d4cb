#include "sparsecl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

#include "sparsecl/errors.hpp"

namespace sparsecl {

void MetricAccumulator::add(const DepthMap& gt, std::span<const double> pred, std::optional<CropRect> crop) {
  if (pred.size() != gt.pixel_count()) throw ShapeError("prediction and ground truth differ in size");
  const CropRect window = crop.value_or(CropRect{0, 0, gt.height(), gt.width()});
  if (window.height == 0 || window.width == 0 || window.top + window.height > gt.height() ||
      window.left + window.width > gt.width())
    throw ShapeError("evaluation crop lies outside the " + to_string(gt.size()) + " raster");

  std::vector<double> clamped(window.width);
  const auto& k = simd::active_kernels();
  for (std::size_t r = window.top; r < window.top + window.height; ++r) {
    const double* p = pred.data() + r * gt.width() + window.left;
    for (std::size_t c = 0; c < window.width; ++c) {
      if (!std::isfinite(p[c])) throw DataError("prediction contains non-finite values");
      clamped[c] = std::clamp(p[c], kMinDepth, kMaxDepth);
    }
    sums_ += k.metric_sums(gt.row(r).data() + window.left, clamped.data(), window.width, kMinDepth);
  }
}

MetricReport MetricAccumulator::report() const {
  if (sums_.n_valid == 0) throw EmptyEvaluationError("no valid ground-truth pixels to evaluate");
  const double n = static_cast<double>(sums_.n_valid);
  MetricReport r;
  r.n_valid = sums_.n_valid;
  r.delta1 = static_cast<double>(sums_.within_d1) / n;
  r.delta2 = static_cast<double>(sums_.within_d2) / n;
  r.delta3 = static_cast<double>(sums_.within_d3) / n;
  r.abs_rel = sums_.abs_rel / n;
  r.sq_rel = sums_.sq_rel / n;
  r.rms = std::sqrt(sums_.sq_err / n);
  r.rms_log = std::sqrt(sums_.sq_log_err / n);
  return r;
}

MetricReport evaluate(const DepthMap& gt, std::span<const double> pred, std::optional<CropRect> crop) {
  MetricAccumulator acc;
  acc.add(gt, pred, crop);
  return acc.report();
}

MetricReport evaluate(const DepthMap& gt, const DepthMap& pred, std::optional<CropRect> crop) {
  return evaluate(gt, pred.values(), crop);
}

void write_metrics_csv_header(std::ostream& out) {
  out << "delta1,delta2,delta3,abs_rel,sq_rel,rms,rms_log,n_valid\n";
}

void write_metrics_csv_row(std::ostream& out, const MetricReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%zu\n", r.delta1, r.delta2, r.delta3,
                r.abs_rel, r.sq_rel, r.rms, r.rms_log, r.n_valid);
  out << buf;
}

}  // namespace sparsecl
