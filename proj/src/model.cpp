#include "sparsecl/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sparsecl/errors.hpp"
#include "sparsecl/simd/kernels.hpp"

namespace sparsecl {
namespace {

constexpr double kDepthSpan = kMaxDepth - kMinDepth;

// ---- elementwise pieces -------------------------------------------------

inline double elu(double x) { return x > 0.0 ? x : std::expm1(x); }
inline double elu_grad(double pre) { return pre > 0.0 ? 1.0 : std::exp(pre); }
inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Tensor apply_elu(const Tensor& pre) {
  Tensor out = pre;
  for (double& v : out.data) v = elu(v);
  return out;
}

Tensor upsample2(const Tensor& in) {
  Tensor out(in.n, in.c, in.h * 2, in.w * 2);
  for (std::size_t n = 0; n < in.n; ++n)
    for (std::size_t c = 0; c < in.c; ++c) {
      const double* src = in.channel(n, c);
      double* dst = out.channel(n, c);
      for (std::size_t y = 0; y < out.h; ++y)
        for (std::size_t x = 0; x < out.w; ++x) dst[y * out.w + x] = src[(y / 2) * in.w + x / 2];
    }
  return out;
}

Tensor upsample2_backward(const Tensor& g_out) {
  Tensor g_in(g_out.n, g_out.c, g_out.h / 2, g_out.w / 2);
  for (std::size_t n = 0; n < g_out.n; ++n)
    for (std::size_t c = 0; c < g_out.c; ++c) {
      const double* src = g_out.channel(n, c);
      double* dst = g_in.channel(n, c);
      for (std::size_t y = 0; y < g_out.h; ++y)
        for (std::size_t x = 0; x < g_out.w; ++x) dst[(y / 2) * g_in.w + x / 2] += src[y * g_out.w + x];
    }
  return g_in;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  Tensor out(a.n, a.c + b.c, a.h, a.w);
  for (std::size_t n = 0; n < a.n; ++n) {
    std::copy_n(a.channel(n, 0), a.c * a.plane(), out.channel(n, 0));
    std::copy_n(b.channel(n, 0), b.c * b.plane(), out.channel(n, a.c));
  }
  return out;
}

// ---- 3x3 convolution, padding 1 ------------------------------------------

// Output columns x whose tap ix = x*stride + kx - 1 lies inside [0, in_w).
struct ColumnRange {
  std::size_t lo, count;
};

ColumnRange valid_columns(std::size_t kx, std::size_t stride, std::size_t in_w, std::size_t out_w) {
  const std::size_t lo = kx == 0 ? 1 : 0;  // ix = x*s - 1 < 0 only for x = 0
  // x*s + kx - 1 <= in_w - 1  <=>  x <= (in_w - kx) / s
  const std::size_t hi = std::min(out_w - 1, (in_w - kx) / stride);
  return {lo, hi >= lo ? hi - lo + 1 : 0};
}

Tensor conv_forward(const Tensor& in, const ConvLayout& L, std::span<const double> params) {
  const std::size_t oh = in.h / L.stride, ow = in.w / L.stride;
  Tensor out(in.n, L.out_c, oh, ow);
  const auto& k = simd::active_kernels();
  const double* weights = params.data() + L.weight_offset;
  const double* bias = params.data() + L.bias_offset;
  for (std::size_t n = 0; n < in.n; ++n)
    for (std::size_t o = 0; o < L.out_c; ++o) {
      double* dst = out.channel(n, o);
      std::fill_n(dst, out.plane(), bias[o]);
      for (std::size_t i = 0; i < L.in_c; ++i) {
        const double* src = in.channel(n, i);
        for (std::size_t ky = 0; ky < 3; ++ky)
          for (std::size_t kx = 0; kx < 3; ++kx) {
            const double w = weights[((o * L.in_c + i) * 3 + ky) * 3 + kx];
            const ColumnRange cols = valid_columns(kx, L.stride, in.w, ow);
            if (cols.count == 0) continue;
            for (std::size_t y = 0; y < oh; ++y) {
              const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(y * L.stride + ky) - 1;
              if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(in.h)) continue;
              const double* src_row = src + static_cast<std::size_t>(iy) * in.w;
              k.axpy_strided(dst + y * ow + cols.lo, src_row + cols.lo * L.stride + kx - 1, L.stride, w,
                             cols.count);
            }
          }
      }
    }
  return out;
}

// Accumulates parameter gradients into `grad` and returns dL/d(input).
Tensor conv_backward(const Tensor& in, const Tensor& g_out, const ConvLayout& L,
                     std::span<const double> params, std::span<double> grad, bool need_input_grad) {
  const auto& k = simd::active_kernels();
  const std::size_t oh = g_out.h, ow = g_out.w;
  const double* weights = params.data() + L.weight_offset;
  double* g_weights = grad.data() + L.weight_offset;
  double* g_bias = grad.data() + L.bias_offset;
  Tensor g_in;
  if (need_input_grad) g_in = Tensor(in.n, in.c, in.h, in.w);

  for (std::size_t n = 0; n < in.n; ++n)
    for (std::size_t o = 0; o < L.out_c; ++o) {
      const double* go = g_out.channel(n, o);
      double bsum = 0.0;
      for (std::size_t p = 0; p < g_out.plane(); ++p) bsum += go[p];
      g_bias[o] += bsum;
      for (std::size_t i = 0; i < L.in_c; ++i) {
        const double* src = in.channel(n, i);
        double* gi = need_input_grad ? g_in.channel(n, i) : nullptr;
        for (std::size_t ky = 0; ky < 3; ++ky)
          for (std::size_t kx = 0; kx < 3; ++kx) {
            const std::size_t widx = ((o * L.in_c + i) * 3 + ky) * 3 + kx;
            const double w = weights[widx];
            const ColumnRange cols = valid_columns(kx, L.stride, in.w, ow);
            if (cols.count == 0) continue;
            double gw = 0.0;
            for (std::size_t y = 0; y < oh; ++y) {
              const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(y * L.stride + ky) - 1;
              if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(in.h)) continue;
              const std::size_t in_off = static_cast<std::size_t>(iy) * in.w + cols.lo * L.stride + kx - 1;
              const double* go_row = go + y * ow + cols.lo;
              gw += k.dot_strided(go_row, src + in_off, L.stride, cols.count);
              if (!gi) continue;
              if (L.stride == 1) {
                k.axpy_strided(gi + in_off, go_row, 1, w, cols.count);
              } else {
                double* dst = gi + in_off;
                for (std::size_t x = 0; x < cols.count; ++x) dst[x * L.stride] += w * go_row[x];
              }
            }
            g_weights[widx] += gw;
          }
      }
    }
  return g_in;
}

}  // namespace

LossKind parse_loss_kind(const std::string& name) {
  if (name == "L1" || name == "l1") return LossKind::L1;
  if (name == "L2" || name == "l2") return LossKind::L2;
  throw ConfigError("unknown loss '" + name + "' (L1|L2)");
}

std::string to_string(LossKind k) { return k == LossKind::L1 ? "L1" : "L2"; }

Tensor make_image_batch(std::span<const RgbImage> images) {
  if (images.empty()) throw ShapeError("empty image batch");
  Tensor t(images.size(), 3, images[0].height, images[0].width);
  for (std::size_t n = 0; n < images.size(); ++n) {
    if (images[n].height != t.h || images[n].width != t.w) throw ShapeError("image batch sizes differ");
    std::copy(images[n].data.begin(), images[n].data.end(), t.channel(n, 0));
  }
  return t;
}

Tensor make_depth_batch(std::span<const DepthMap> maps) {
  if (maps.empty()) throw ShapeError("empty depth batch");
  Tensor t(maps.size(), 1, maps[0].height(), maps[0].width());
  for (std::size_t n = 0; n < maps.size(); ++n) {
    if (maps[n].height() != t.h || maps[n].width() != t.w) throw ShapeError("depth batch sizes differ");
    const auto v = maps[n].values();
    std::copy(v.begin(), v.end(), t.channel(n, 0));
  }
  return t;
}

ToyModel::ToyModel(const ModelConfig& config) : config_(config) {
  build_layout();
  std::mt19937_64 rng(config_.init_seed);
  const auto uniform = [&rng](double bound) {
    return (static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0) * bound;
  };
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const ConvLayout& L = layers_[l];
    const bool last = l + 1 == layers_.size();
    const double bound = (last && config_.zero_final_layer) ? 0.0 : std::sqrt(6.0 / (9.0 * L.in_c));
    for (std::size_t i = 0; i < L.weight_count(); ++i) params_[L.weight_offset + i] = uniform(bound);
  }
}

ToyModel::ToyModel(const ModelConfig& config, std::vector<double> params) : config_(config) {
  build_layout();
  if (params.size() != params_.size())
    throw ShapeError("checkpoint has " + std::to_string(params.size()) + " parameters, model needs " +
                     std::to_string(params_.size()));
  for (double v : params)
    if (!std::isfinite(v)) throw DataError("checkpoint contains non-finite parameters");
  params_ = std::move(params);
}

void ToyModel::build_layout() {
  if (config_.c1 == 0 || config_.c2 == 0) throw ConfigError("channel widths must be positive");
  const std::size_t c1 = config_.c1, c2 = config_.c2;
  const std::size_t shapes[4][3] = {{3, c1, 2}, {c1, c2, 2}, {c2, c1, 1}, {2 * c1, 1, 1}};
  std::size_t offset = 0;
  layers_.clear();
  for (const auto& s : shapes) {
    ConvLayout L{s[0], s[1], s[2], offset, 0};
    offset += L.weight_count();
    L.bias_offset = offset;
    offset += L.out_c;
    layers_.push_back(L);
  }
  params_.assign(offset, 0.0);
}

struct ToyModel::Activations {
  Tensor e1_pre, e1, e2_pre, e2, u2, d2_pre, d2, u1, z, depth;
};

ToyModel::Activations ToyModel::run(const Tensor& x) const {
  if (x.c != 3) throw ShapeError("model input must have 3 channels");
  if (x.n == 0 || x.h == 0 || x.w == 0 || x.h % 4 != 0 || x.w % 4 != 0)
    throw ShapeError("model input size " + std::to_string(x.h) + "x" + std::to_string(x.w) +
                     " must be a non-empty multiple of 4");
  Activations a;
  a.e1_pre = conv_forward(x, layers_[0], params_);
  a.e1 = apply_elu(a.e1_pre);
  a.e2_pre = conv_forward(a.e1, layers_[1], params_);
  a.e2 = apply_elu(a.e2_pre);
  a.u2 = upsample2(a.e2);
  a.d2_pre = conv_forward(a.u2, layers_[2], params_);
  a.d2 = apply_elu(a.d2_pre);
  a.u1 = upsample2(concat_channels(a.d2, a.e1));
  a.z = conv_forward(a.u1, layers_[3], params_);
  a.depth = a.z;
  for (double& v : a.depth.data) v = kMinDepth + sigmoid(v) * kDepthSpan;
  return a;
}

Tensor ToyModel::forward(const Tensor& images) const { return run(images).depth; }

double masked_loss(const Tensor& pred, const Tensor& target, LossKind kind, std::size_t* n_valid) {
  if (pred.n != target.n || pred.h != target.h || pred.w != target.w || pred.c != 1 || target.c != 1)
    throw ShapeError("prediction and target batches differ in shape");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    if (!is_valid_depth(target.data[i])) continue;
    const double d = pred.data[i] - target.data[i];
    sum += kind == LossKind::L1 ? std::fabs(d) : d * d;
    ++count;
  }
  if (n_valid) *n_valid = count;
  return count ? sum / static_cast<double>(count) : 0.0;
}

LossResult ToyModel::loss_and_grad(const Tensor& images, const Tensor& targets, LossKind kind) const {
  const Activations a = run(images);
  LossResult r;
  r.loss = masked_loss(a.depth, targets, kind, &r.n_valid);
  r.grad.assign(params_.size(), 0.0);
  if (r.n_valid == 0) return r;

  // dL/dz through the masked loss and the scaled sigmoid.
  const double inv_n = 1.0 / static_cast<double>(r.n_valid);
  Tensor g_z(a.z.n, 1, a.z.h, a.z.w);
  for (std::size_t i = 0; i < g_z.data.size(); ++i) {
    const double t = targets.data[i];
    if (!is_valid_depth(t)) continue;
    const double diff = a.depth.data[i] - t;
    const double g_depth = kind == LossKind::L1 ? (diff > 0.0 ? 1.0 : diff < 0.0 ? -1.0 : 0.0) * inv_n
                                                : 2.0 * diff * inv_n;
    const double s = sigmoid(a.z.data[i]);
    g_z.data[i] = g_depth * kDepthSpan * s * (1.0 - s);
  }

  const Tensor cat = concat_channels(a.d2, a.e1);
  const Tensor g_u1 = conv_backward(a.u1, g_z, layers_[3], params_, r.grad, true);
  const Tensor g_cat = upsample2_backward(g_u1);

  const std::size_t c1 = config_.c1;
  Tensor g_d2_pre(a.d2.n, c1, a.d2.h, a.d2.w), g_e1(a.e1.n, c1, a.e1.h, a.e1.w);
  for (std::size_t n = 0; n < cat.n; ++n)
    for (std::size_t p = 0; p < c1 * cat.plane(); ++p) {
      g_d2_pre.channel(n, 0)[p] = g_cat.channel(n, 0)[p] * elu_grad(a.d2_pre.channel(n, 0)[p]);
      g_e1.channel(n, 0)[p] = g_cat.channel(n, c1)[p];
    }

  const Tensor g_u2 = conv_backward(a.u2, g_d2_pre, layers_[2], params_, r.grad, true);
  Tensor g_e2_pre = upsample2_backward(g_u2);
  for (std::size_t i = 0; i < g_e2_pre.data.size(); ++i) g_e2_pre.data[i] *= elu_grad(a.e2_pre.data[i]);

  const Tensor g_e1_from_enc2 = conv_backward(a.e1, g_e2_pre, layers_[1], params_, r.grad, true);
  Tensor g_e1_pre = g_e1;
  for (std::size_t i = 0; i < g_e1_pre.data.size(); ++i)
    g_e1_pre.data[i] = (g_e1_pre.data[i] + g_e1_from_enc2.data[i]) * elu_grad(a.e1_pre.data[i]);

  conv_backward(images, g_e1_pre, layers_[0], params_, r.grad, false);
  return r;
}

}  // namespace sparsecl
