#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sparsecl {

/// lr(step) = initial * factor^floor(step / interval).
struct StepDecaySchedule {
  double initial = 1e-4;
  double factor = 0.9;
  std::size_t interval = 23000;

  double at(std::size_t step) const;
};

/// Decay interval scaled from 23k out of a 106k-step run to `total_steps`;
/// at least 1.
std::size_t scaled_decay_interval(std::size_t total_steps);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  StepDecaySchedule schedule;
};

class Adam {
 public:
  Adam(std::size_t parameter_count, AdamConfig config);

  /// One update; `params` and `grad` must have parameter_count() entries.
  void step(std::span<double> params, std::span<const double> grad);

  std::size_t step_count() const noexcept { return step_; }
  double current_lr() const { return config_.schedule.at(step_); }
  std::size_t parameter_count() const noexcept { return m_.size(); }
  const AdamConfig& config() const noexcept { return config_; }
  std::span<const double> first_moment() const noexcept { return m_; }
  std::span<const double> second_moment() const noexcept { return v_; }

 private:
  AdamConfig config_;
  std::vector<double> m_, v_;
  std::size_t step_ = 0;
};

}  // namespace sparsecl
