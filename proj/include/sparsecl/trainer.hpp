#pragma once
// Curriculum training loop: each batch's ground truth is dilated with the
// scheduler's current syllabus, one optimizer step is taken, and the batch
// loss is fed back to the scheduler.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsecl/augment.hpp"
#include "sparsecl/dataset.hpp"
#include "sparsecl/dilation.hpp"
#include "sparsecl/metrics.hpp"
#include "sparsecl/model.hpp"
#include "sparsecl/optim.hpp"
#include "sparsecl/scheduler.hpp"

namespace sparsecl {

inline constexpr std::size_t kDefaultBatchSize = 16;

struct TrainConfig {
  TargetSize target{256, 512};
  std::size_t batch_size = kDefaultBatchSize;
  std::size_t max_steps = 1000;
  LossKind loss = LossKind::L1;
  std::uint64_t seed = 0;  // batch order
  std::optional<AugmentConfig> augment;
  ImputationMethod imputation = ImputationMethod::max;
  /// Reuse dilated targets keyed by (sample, syllabus). Ignored when augmenting.
  bool cache_dilation = true;
};

struct TrainResult {
  std::vector<SchedulerEvent> events;
  SchedulerState final_state;
  std::size_t steps = 0;
  std::size_t epochs_completed = 0;
  std::size_t advances = 0;
  std::vector<std::string> warnings;
};

/// Trains `model` in place. Stops when the scheduler finishes or after
/// config.max_steps optimizer steps. Every sample needs an RGB image.
/// Throws TrainingError on a non-finite loss and DataError/ShapeError for
/// inconsistent inputs.
TrainResult train(const CurriculumPlan& plan, const Dataset& dataset, ToyModel& model, Adam& optim,
                  const TrainConfig& config);

/// Runs the model at `model_size` and resizes the prediction (nearest) to
/// `out_size`. The result is the raw prediction buffer, row-major.
std::vector<double> predict(const ToyModel& model, const RgbImage& image, TargetSize model_size, TargetSize out_size);

/// Metrics of `model` against `references` (e.g. dense oracle maps or the
/// sparse ground truth), pooled over all samples.
MetricReport evaluate_model(const ToyModel& model, const Dataset& dataset, const std::vector<DepthMap>& references,
                            TargetSize model_size);

}  // namespace sparsecl
