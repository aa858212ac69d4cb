#include "sparsecl/optim.hpp"

#include <algorithm>
#include <cmath>

#include "sparsecl/errors.hpp"

namespace sparsecl {

double StepDecaySchedule::at(std::size_t step) const {
  return initial * std::pow(factor, static_cast<double>(step / interval));
}

std::size_t scaled_decay_interval(std::size_t total_steps) {
  return std::max<std::size_t>(1, total_steps * 23 / 106);
}

Adam::Adam(std::size_t parameter_count, AdamConfig config)
    : config_(config), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {
  if (!(config_.schedule.initial > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(config_.schedule.factor > 0.0)) throw ConfigError("learning-rate decay factor must be positive");
  if (config_.schedule.interval == 0) throw ConfigError("learning-rate decay interval must be >= 1");
}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw ShapeError("optimizer was built for " + std::to_string(m_.size()) + " parameters");
  const double lr = config_.schedule.at(step_);
  ++step_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (std::size_t i = 0; i < m_.size(); ++i) {
    m_[i] = b1 * m_[i] + (1.0 - b1) * grad[i];
    v_[i] = b2 * v_[i] + (1.0 - b2) * grad[i] * grad[i];
    params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + config_.epsilon);
  }
}

}  // namespace sparsecl
