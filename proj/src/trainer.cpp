#include "sparsecl/trainer.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "sparsecl/errors.hpp"

namespace sparsecl {
namespace {

// Fisher-Yates with an explicit uniform draw (std::shuffle is not portable).
void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(static_cast<double>(rng() >> 11) * 0x1.0p-53 * static_cast<double>(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

TrainResult train(const CurriculumPlan& plan, const Dataset& dataset, ToyModel& model, Adam& optim,
                  const TrainConfig& config) {
  plan.validate();
  if (dataset.empty()) throw DataError("training dataset is empty");
  if (config.batch_size == 0) throw ConfigError("batch size must be >= 1");
  if (optim.parameter_count() != model.parameter_count())
    throw ShapeError("optimizer and model parameter counts differ");
  for (const auto& s : dataset.samples)
    if (!s.image) throw DataError("sample '" + s.id + "' has no RGB image");

  const bool augmenting = config.augment.has_value();
  const std::size_t batch = std::min(config.batch_size, dataset.size());

  // Base (pre-dilation) pairs at the model resolution unless cropping.
  std::vector<RgbImage> images;
  std::vector<DepthMap> truths;
  for (const auto& s : dataset.samples) {
    if (augmenting && config.augment->crop) {
      if (*config.augment->crop != config.target)
        throw ConfigError("augmentation crop must equal the target size");
      images.push_back(*s.image);
      truths.push_back(s.ground_truth);
    } else {
      images.push_back(resize_nearest(*s.image, config.target));
      truths.push_back(resize_nearest(s.ground_truth, config.target));
    }
  }

  TrainResult result;
  SchedulerState state = new_state(plan);
  std::map<std::pair<std::size_t, std::size_t>, DepthMap> cache;
  std::mt19937_64 order_rng(config.seed);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(order, order_rng);
  std::size_t cursor = 0;

  std::vector<RgbImage> batch_images;
  std::vector<DepthMap> batch_targets;
  while (result.steps < config.max_steps && !state.finished) {
    if (cursor + batch > order.size()) {
      ++result.epochs_completed;
      const std::size_t before = state.syllabus_index;
      state = epoch_boundary(std::move(state), plan);
      if (state.finished || state.syllabus_index != before) ++result.advances;
      if (state.finished) break;
      shuffle(order, order_rng);
      cursor = 0;
    }
    const SyllabusSpec& syllabus = current_syllabus(state, plan);
    batch_images.clear();
    batch_targets.clear();
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t idx = order[cursor + b];
      if (augmenting) {
        auto [img, gt] = augment(images[idx], truths[idx], *config.augment, dataset.samples[idx].id,
                                 result.epochs_completed);
        batch_images.push_back(std::move(img));
        batch_targets.push_back(impute(gt, syllabus, config.target, config.imputation));
      } else if (config.cache_dilation) {
        const auto key = std::pair{idx, state.syllabus_index};
        auto it = cache.find(key);
        if (it == cache.end())
          it = cache.emplace(key, impute(truths[idx], syllabus, config.target, config.imputation)).first;
        batch_images.push_back(images[idx]);
        batch_targets.push_back(it->second);
      } else {
        batch_images.push_back(images[idx]);
        batch_targets.push_back(impute(truths[idx], syllabus, config.target, config.imputation));
      }
    }
    cursor += batch;

    const LossResult lr = model.loss_and_grad(make_image_batch(batch_images), make_depth_batch(batch_targets),
                                              config.loss);
    ++result.steps;
    if (!std::isfinite(lr.loss))
      throw TrainingError("non-finite training loss at step " + std::to_string(result.steps) + " (syllabus " +
                          std::to_string(state.syllabus_index) + ", lr " + std::to_string(optim.current_lr()) + ")");
    if (lr.n_valid == 0) {
      result.warnings.push_back("step " + std::to_string(result.steps) +
                                ": batch has no valid target pixels; update skipped");
      continue;
    }
    optim.step(model.params(), lr.grad);
    SchedulerEvent ev;
    state = record_loss(std::move(state), plan, lr.loss, &ev);
    if (ev.advanced) ++result.advances;
    result.events.push_back(ev);
  }
  result.final_state = std::move(state);
  return result;
}

std::vector<double> predict(const ToyModel& model, const RgbImage& image, TargetSize model_size, TargetSize out_size) {
  const RgbImage input = resize_nearest(image, model_size);
  const Tensor out = model.forward(make_image_batch(std::span<const RgbImage>(&input, 1)));
  if (model_size == out_size) return out.data;
  // Nearest resize of the raw prediction (all values are valid depths).
  const DepthMap resized = resize_nearest(DepthMap(out.h, out.w, out.data), out_size);
  return {resized.values().begin(), resized.values().end()};
}

MetricReport evaluate_model(const ToyModel& model, const Dataset& dataset, const std::vector<DepthMap>& references,
                            TargetSize model_size) {
  if (references.size() != dataset.size()) throw DataError("reference count does not match dataset size");
  MetricAccumulator acc;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& s = dataset.samples[i];
    if (!s.image) throw DataError("sample '" + s.id + "' has no RGB image");
    acc.add(references[i], predict(model, *s.image, model_size, references[i].size()));
  }
  return acc.report();
}

}  // namespace sparsecl
