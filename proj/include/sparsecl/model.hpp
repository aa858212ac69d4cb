#pragma once
// Small reference encoder-decoder for dense depth regression.
//
//   x [3,H,W]
//   e1 = elu(conv3x3/2(x))            [c1, H/2, W/2]
//   e2 = elu(conv3x3/2(e1))           [c2, H/4, W/4]
//   d2 = elu(conv3x3(up2(e2)))        [c1, H/2, W/2]
//   z  = conv3x3(up2(concat(d2, e1))) [1,  H,   W]    skip from e1
//   depth = d_min + sigmoid(z) * (d_max - d_min)
//
// All parameters live in one flat buffer; gradients use the same layout.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sparsecl/depth_map.hpp"

namespace sparsecl {

/// Dense NCHW tensor of doubles.
struct Tensor {
  std::size_t n = 0, c = 0, h = 0, w = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t n_, std::size_t c_, std::size_t h_, std::size_t w_, double fill = 0.0)
      : n(n_), c(c_), h(h_), w(w_), data(n_ * c_ * h_ * w_, fill) {}

  std::size_t plane() const noexcept { return h * w; }
  double* channel(std::size_t ni, std::size_t ci) noexcept { return data.data() + (ni * c + ci) * plane(); }
  const double* channel(std::size_t ni, std::size_t ci) const noexcept {
    return data.data() + (ni * c + ci) * plane();
  }
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

/// Stacks RGB images (all the same size) into an [N,3,H,W] tensor.
Tensor make_image_batch(std::span<const RgbImage> images);
/// Stacks depth maps into an [N,1,H,W] tensor.
Tensor make_depth_batch(std::span<const DepthMap> maps);

struct ModelConfig {
  std::size_t c1 = 8;
  std::size_t c2 = 16;
  std::uint64_t init_seed = 0;
  /// Zero the output convolution so every prediction starts at mid-range.
  bool zero_final_layer = false;
};

struct ConvLayout {
  std::size_t in_c, out_c, stride;
  std::size_t weight_offset, bias_offset;
  std::size_t weight_count() const noexcept { return out_c * in_c * 9; }
};

enum class LossKind { L1, L2 };

LossKind parse_loss_kind(const std::string& name);
std::string to_string(LossKind k);

struct LossResult {
  double loss = 0.0;
  std::size_t n_valid = 0;
  std::vector<double> grad;  // same layout as ToyModel::params()
};

class ToyModel {
 public:
  explicit ToyModel(const ModelConfig& config);
  /// Rebuilds a model from a parameter buffer; throws ShapeError on size mismatch.
  ToyModel(const ModelConfig& config, std::vector<double> params);

  const ModelConfig& config() const noexcept { return config_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }
  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }
  /// enc1, enc2, dec2, dec1 in that order.
  const std::vector<ConvLayout>& layers() const noexcept { return layers_; }

  /// Predictions [N,1,H,W] in [kMinDepth, kMaxDepth]. H and W must be
  /// multiples of 4; throws ShapeError otherwise.
  Tensor forward(const Tensor& images) const;

  /// Mean loss over pixels whose target is valid (>= kMinDepth) across the
  /// whole batch, with its exact gradient. Invalid pixels contribute nothing;
  /// an all-invalid batch yields loss 0 and a zero gradient.
  LossResult loss_and_grad(const Tensor& images, const Tensor& targets, LossKind kind) const;

 private:
  struct Activations;
  void build_layout();
  Activations run(const Tensor& images) const;

  ModelConfig config_;
  std::vector<ConvLayout> layers_;
  std::vector<double> params_;
};

/// Masked loss of predictions against targets with no model involved.
double masked_loss(const Tensor& predictions, const Tensor& targets, LossKind kind, std::size_t* n_valid = nullptr);

}  // namespace sparsecl
