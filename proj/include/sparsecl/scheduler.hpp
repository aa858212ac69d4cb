#pragma once
// Syllabus advancement driven by the training loss.
//
// A step "violates" when loss > lambda * previous loss within the current
// syllabus. After P_i violations (consecutive or cumulative, per mode) the
// scheduler moves to the next syllabus; after the last one it is finished.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "sparsecl/syllabus.hpp"

namespace sparsecl {

enum class PatienceMode {
  consecutive,  // a non-violating step resets the counter
  cumulative,   // violations accumulate for the whole syllabus
};

inline constexpr double kDefaultLambda = 0.999;
inline constexpr std::size_t kDefaultPatience = 50;

struct CurriculumPlan {
  std::vector<SyllabusSpec> syllabuses;
  std::vector<std::size_t> patience;
  double lambda = kDefaultLambda;
  PatienceMode mode = PatienceMode::consecutive;
  bool advance_on_epoch_end = false;
  /// Catalog indices of `syllabuses`, kept for serialization.
  std::vector<std::size_t> catalog_indices;

  /// Throws ConfigError on empty plans, length mismatch, lambda outside
  /// [0, 1] or zero patience.
  void validate() const;
};

/// Uniform patience for every syllabus of `syllabuses`.
CurriculumPlan make_plan(std::vector<SyllabusSpec> syllabuses, std::size_t patience, double lambda,
                         PatienceMode mode = PatienceMode::consecutive);

struct SchedulerState {
  std::size_t syllabus_index = 0;
  std::size_t patience_counter = 0;
  std::vector<double> train_history;
  /// Position in train_history where the current syllabus began.
  std::size_t window_start = 0;
  bool finished = false;

  friend bool operator==(const SchedulerState&, const SchedulerState&) = default;
};

/// What happened on one record_loss call.
struct SchedulerEvent {
  std::size_t step = 0;  // 1-based count of recorded losses
  double loss = 0.0;
  std::size_t syllabus_index = 0;  // syllabus the loss was measured under
  std::size_t patience_counter = 0;  // counter after the step (before reset on advance)
  bool violation = false;
  bool advanced = false;
};

SchedulerState new_state(const CurriculumPlan& plan);

/// Throws StateError after the plan finished and ConfigError for a negative
/// or non-finite loss. `event`, when given, receives the step record.
SchedulerState record_loss(SchedulerState state, const CurriculumPlan& plan, double loss,
                           SchedulerEvent* event = nullptr);

/// Throws StateError when finished.
const SyllabusSpec& current_syllabus(const SchedulerState& state, const CurriculumPlan& plan);

/// With plan.advance_on_epoch_end, moves to the next syllabus (or finishes);
/// otherwise returns the state unchanged.
SchedulerState epoch_boundary(SchedulerState state, const CurriculumPlan& plan);

/// CSV "step,loss,syllabus_index,patience_counter,advanced".
void write_event_log_csv(std::ostream& out, std::span<const SchedulerEvent> events);

}  // namespace sparsecl
