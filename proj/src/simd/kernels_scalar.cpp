#include "sparsecl/simd/kernels.hpp"

#include <cmath>

namespace sparsecl::simd {
namespace {

void max_pool_row(const double* src, std::size_t src_stride, std::size_t kh, std::size_t kw,
                  std::size_t out_w, double* dst) {
  for (std::size_t j = 0; j < out_w; ++j) {
    const double* win = src + j * kw;
    double m = win[0];
    for (std::size_t r = 0; r < kh; ++r) {
      const double* row = win + r * src_stride;
      for (std::size_t c = 0; c < kw; ++c) m = row[c] > m ? row[c] : m;
    }
    dst[j] = m;
  }
}

void mean_pool_row(const double* src, std::size_t src_stride, std::size_t kh, std::size_t kw,
                   std::size_t out_w, double* dst) {
  const double count = static_cast<double>(kh * kw);
  for (std::size_t j = 0; j < out_w; ++j) {
    const double* win = src + j * kw;
    double s = 0.0;
    for (std::size_t r = 0; r < kh; ++r) {
      const double* row = win + r * src_stride;
      for (std::size_t c = 0; c < kw; ++c) s += row[c];
    }
    dst[j] = s / count;
  }
}

std::size_t count_valid(const double* src, std::size_t n, double threshold) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) k += src[i] >= threshold ? 1 : 0;
  return k;
}

void axpy_strided(double* dst, const double* src, std::size_t src_stride, double alpha,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += alpha * src[i * src_stride];
}

double dot_strided(const double* a, const double* b, std::size_t b_stride, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i * b_stride];
  return s;
}

MetricSums metric_sums(const double* gt, const double* pred, std::size_t n,
                       double valid_threshold) {
  constexpr double t1 = 1.25, t2 = 1.25 * 1.25, t3 = 1.25 * 1.25 * 1.25;
  MetricSums s;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = gt[i];
    if (!(d >= valid_threshold)) continue;
    const double p = pred[i];
    const double diff = d - p;
    const double ratio = d > p ? d / p : p / d;
    const double lg = std::log(d) - std::log(p);
    ++s.n_valid;
    s.within_d1 += ratio < t1;
    s.within_d2 += ratio < t2;
    s.within_d3 += ratio < t3;
    s.sq_err += diff * diff;
    s.abs_rel += std::fabs(diff) / d;
    s.sq_rel += diff * diff / d;
    s.sq_log_err += lg * lg;
  }
  return s;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{"scalar",     &max_pool_row, &mean_pool_row, &count_valid,
                                 &axpy_strided, &dot_strided,  &metric_sums};
  return table;
}

}  // namespace sparsecl::simd
