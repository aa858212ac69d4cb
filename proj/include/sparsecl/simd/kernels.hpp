#pragma once
// Data-parallel inner loops used by pooling, convolution and metrics.
//
// Every kernel exists as a scalar reference and, on x86-64, an AVX2 variant.
// The active table is chosen once at startup from the CPU feature bits and
// can be overridden with SPARSECL_SIMD=scalar|avx2|auto.
//
// Exactness contract:
//   - max_pool_row, mean_pool_row, count_valid, axpy_strided: the SIMD variant
//     is lane-parallel over independent outputs and keeps the scalar
//     accumulation order per output, so results are bit-identical.
//   - dot_strided, metric_sums: horizontal reductions; the SIMD variant uses
//     four partial sums, so results agree to rounding only.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace sparsecl::simd {

/// Raw per-pixel sums behind the six depth metrics.
struct MetricSums {
  std::size_t n_valid = 0;
  std::size_t within_d1 = 0;
  std::size_t within_d2 = 0;
  std::size_t within_d3 = 0;
  double sq_err = 0.0;
  double abs_rel = 0.0;
  double sq_rel = 0.0;
  double sq_log_err = 0.0;

  MetricSums& operator+=(const MetricSums& o) noexcept {
    n_valid += o.n_valid;
    within_d1 += o.within_d1;
    within_d2 += o.within_d2;
    within_d3 += o.within_d3;
    sq_err += o.sq_err;
    abs_rel += o.abs_rel;
    sq_rel += o.sq_rel;
    sq_log_err += o.sq_log_err;
    return *this;
  }
};

struct KernelTable {
  const char* name;

  // One output row of a non-overlapping kh x kw pool. `src` points at the
  // first of kh input rows spaced `src_stride` apart; dst gets out_w values.
  void (*max_pool_row)(const double* src, std::size_t src_stride, std::size_t kh,
                       std::size_t kw, std::size_t out_w, double* dst);
  // Window sum in row-major order divided by kh*kw.
  void (*mean_pool_row)(const double* src, std::size_t src_stride, std::size_t kh,
                        std::size_t kw, std::size_t out_w, double* dst);
  // Number of values >= threshold.
  std::size_t (*count_valid)(const double* src, std::size_t n, double threshold);
  // dst[i] += alpha * src[i * src_stride], i < n.
  void (*axpy_strided)(double* dst, const double* src, std::size_t src_stride, double alpha,
                       std::size_t n);
  // sum_i a[i] * b[i * b_stride], i < n.
  double (*dot_strided)(const double* a, const double* b, std::size_t b_stride, std::size_t n);
  // Sums over pixels with gt >= valid_threshold. pred must already be clamped
  // to the positive depth range.
  MetricSums (*metric_sums)(const double* gt, const double* pred, std::size_t n,
                            double valid_threshold);
};

const KernelTable& scalar_kernels() noexcept;
/// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_kernels() noexcept;

/// Table used by the library. Resolved on first call.
const KernelTable& active_kernels() noexcept;
/// Force a table ("scalar", "avx2", "auto"). Returns false when unavailable.
/// Not thread-safe; intended for tests and the CLI's startup.
bool select_kernels(std::string_view which) noexcept;

}  // namespace sparsecl::simd
