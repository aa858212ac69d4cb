// AVX2 variants of the kernels in kernels_scalar.cpp. Compiled with -mavx2
// only; the dispatcher checks the CPU before handing this table out.
#include "sparsecl/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace sparsecl::simd {
namespace {

inline __m256i lane_offsets(std::size_t step) {
  const auto s = static_cast<long long>(step);
  return _mm256_setr_epi64x(0, s, 2 * s, 3 * s);
}

void max_pool_row(const double* src, std::size_t src_stride, std::size_t kh, std::size_t kw,
                  std::size_t out_w, double* dst) {
  const __m256i idx = lane_offsets(kw);
  std::size_t j = 0;
  for (; j + 4 <= out_w; j += 4) {
    const double* win = src + j * kw;
    __m256d m = _mm256_i64gather_pd(win, idx, 8);
    for (std::size_t r = 0; r < kh; ++r) {
      const double* row = win + r * src_stride;
      for (std::size_t c = 0; c < kw; ++c) m = _mm256_max_pd(_mm256_i64gather_pd(row + c, idx, 8), m);
    }
    _mm256_storeu_pd(dst + j, m);
  }
  if (j < out_w) scalar_kernels().max_pool_row(src + j * kw, src_stride, kh, kw, out_w - j, dst + j);
}

void mean_pool_row(const double* src, std::size_t src_stride, std::size_t kh, std::size_t kw,
                   std::size_t out_w, double* dst) {
  const __m256i idx = lane_offsets(kw);
  const __m256d count = _mm256_set1_pd(static_cast<double>(kh * kw));
  std::size_t j = 0;
  for (; j + 4 <= out_w; j += 4) {
    const double* win = src + j * kw;
    __m256d s = _mm256_setzero_pd();
    for (std::size_t r = 0; r < kh; ++r) {
      const double* row = win + r * src_stride;
      for (std::size_t c = 0; c < kw; ++c) s = _mm256_add_pd(s, _mm256_i64gather_pd(row + c, idx, 8));
    }
    _mm256_storeu_pd(dst + j, _mm256_div_pd(s, count));
  }
  if (j < out_w) scalar_kernels().mean_pool_row(src + j * kw, src_stride, kh, kw, out_w - j, dst + j);
}

std::size_t count_valid(const double* src, std::size_t n, double threshold) {
  const __m256d t = _mm256_set1_pd(threshold);
  std::size_t k = 0, i = 0;
  for (; i + 4 <= n; i += 4) {
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(src + i), t, _CMP_GE_OQ));
    k += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
  }
  return k + scalar_kernels().count_valid(src + i, n - i, threshold);
}

void axpy_strided(double* dst, const double* src, std::size_t src_stride, double alpha,
                  std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  if (src_stride == 1) {
    for (; i + 4 <= n; i += 4) {
      const __m256d p = _mm256_mul_pd(a, _mm256_loadu_pd(src + i));
      _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), p));
    }
  } else if (src_stride == 2) {
    // The second load touches src[2i+7]; stop one group early so it never
    // reads past src[2(n-1)].
    for (; i + 4 < n; i += 4) {
      const __m256d lo = _mm256_loadu_pd(src + 2 * i);
      const __m256d hi = _mm256_loadu_pd(src + 2 * i + 4);
      const __m256d even = _mm256_permute4x64_pd(_mm256_unpacklo_pd(lo, hi), 0xD8);
      _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), _mm256_mul_pd(a, even)));
    }
  } else {
    const __m256i idx = lane_offsets(src_stride);
    for (; i + 4 <= n; i += 4) {
      const __m256d s = _mm256_i64gather_pd(src + i * src_stride, idx, 8);
      _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), _mm256_mul_pd(a, s)));
    }
  }
  for (; i < n; ++i) dst[i] += alpha * src[i * src_stride];
}

inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double dot_strided(const double* a, const double* b, std::size_t b_stride, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  if (b_stride == 1) {
    for (; i + 4 <= n; i += 4)
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  } else {
    const __m256i idx = lane_offsets(b_stride);
    for (; i + 4 <= n; i += 4)
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                             _mm256_i64gather_pd(b + i * b_stride, idx, 8)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i * b_stride];
  return s;
}

MetricSums metric_sums(const double* gt, const double* pred, std::size_t n,
                       double valid_threshold) {
  const __m256d thr = _mm256_set1_pd(valid_threshold);
  const __m256d t1 = _mm256_set1_pd(1.25);
  const __m256d t2 = _mm256_set1_pd(1.25 * 1.25);
  const __m256d t3 = _mm256_set1_pd(1.25 * 1.25 * 1.25);
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d sq = _mm256_setzero_pd(), ar = _mm256_setzero_pd(), sr = _mm256_setzero_pd();
  alignas(32) double log_acc[4] = {0.0, 0.0, 0.0, 0.0};
  MetricSums s;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_loadu_pd(gt + i);
    const __m256d p = _mm256_loadu_pd(pred + i);
    const __m256d valid = _mm256_cmp_pd(d, thr, _CMP_GE_OQ);
    const int vmask = _mm256_movemask_pd(valid);
    if (vmask == 0) continue;
    const __m256d diff = _mm256_sub_pd(d, p);
    const __m256d diff2 = _mm256_mul_pd(diff, diff);
    const __m256d ratio = _mm256_max_pd(_mm256_div_pd(d, p), _mm256_div_pd(p, d));
    sq = _mm256_add_pd(sq, _mm256_and_pd(valid, diff2));
    ar = _mm256_add_pd(ar, _mm256_and_pd(valid, _mm256_div_pd(_mm256_andnot_pd(sign, diff), d)));
    sr = _mm256_add_pd(sr, _mm256_and_pd(valid, _mm256_div_pd(diff2, d)));
    const auto hits = [&](__m256d t) {
      const int m = _mm256_movemask_pd(_mm256_and_pd(valid, _mm256_cmp_pd(ratio, t, _CMP_LT_OQ)));
      return static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(m)));
    };
    s.n_valid += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(vmask)));
    s.within_d1 += hits(t1);
    s.within_d2 += hits(t2);
    s.within_d3 += hits(t3);
    for (int l = 0; l < 4; ++l) {
      if (vmask & (1 << l)) {
        const double lg = std::log(gt[i + l]) - std::log(pred[i + l]);
        log_acc[l] += lg * lg;
      }
    }
  }
  s.sq_err = hsum(sq);
  s.abs_rel = hsum(ar);
  s.sq_rel = hsum(sr);
  s.sq_log_err = (log_acc[0] + log_acc[1]) + (log_acc[2] + log_acc[3]);
  s += scalar_kernels().metric_sums(gt + i, pred + i, n - i, valid_threshold);
  return s;
}

}  // namespace

const KernelTable& avx2_kernel_table() noexcept {
  static const KernelTable table{"avx2",        &max_pool_row, &mean_pool_row, &count_valid,
                                 &axpy_strided, &dot_strided,  &metric_sums};
  return table;
}

}  // namespace sparsecl::simd
