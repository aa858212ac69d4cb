#include "sparsecl/scheduler.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "sparsecl/errors.hpp"

namespace sparsecl {

void CurriculumPlan::validate() const {
  if (syllabuses.empty()) throw ConfigError("curriculum plan has no syllabuses");
  if (patience.size() != syllabuses.size())
    throw ConfigError("curriculum plan has " + std::to_string(syllabuses.size()) + " syllabuses but " +
                      std::to_string(patience.size()) + " patience values");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw ConfigError("minimum-decrease lambda must be in [0, 1], got " + std::to_string(lambda));
  for (std::size_t p : patience)
    if (p == 0) throw ConfigError("patience values must be >= 1");
  if (!catalog_indices.empty() && catalog_indices.size() != syllabuses.size())
    throw ConfigError("catalog index list does not match syllabus count");
}

CurriculumPlan make_plan(std::vector<SyllabusSpec> syllabuses, std::size_t patience, double lambda,
                         PatienceMode mode) {
  CurriculumPlan plan;
  plan.patience.assign(syllabuses.size(), patience);
  plan.syllabuses = std::move(syllabuses);
  plan.lambda = lambda;
  plan.mode = mode;
  plan.validate();
  return plan;
}

SchedulerState new_state(const CurriculumPlan& plan) {
  plan.validate();
  return {};
}

namespace {

void advance(SchedulerState& s, const CurriculumPlan& plan) {
  s.patience_counter = 0;
  s.window_start = s.train_history.size();
  if (s.syllabus_index + 1 < plan.syllabuses.size()) ++s.syllabus_index;
  else s.finished = true;
}

}  // namespace

SchedulerState record_loss(SchedulerState state, const CurriculumPlan& plan, double loss,
                           SchedulerEvent* event) {
  if (state.finished) throw StateError("record_loss called after the curriculum finished");
  if (!std::isfinite(loss) || loss < 0.0)
    throw ConfigError("training loss must be finite and non-negative");

  SchedulerEvent ev;
  ev.loss = loss;
  ev.syllabus_index = state.syllabus_index;
  state.train_history.push_back(loss);
  ev.step = state.train_history.size();

  const std::size_t in_window = state.train_history.size() - state.window_start;
  if (in_window >= 2) {
    const double prev = state.train_history[state.train_history.size() - 2];
    ev.violation = loss > plan.lambda * prev;
    if (ev.violation) ++state.patience_counter;
    else if (plan.mode == PatienceMode::consecutive) state.patience_counter = 0;
  }
  ev.patience_counter = state.patience_counter;
  if (state.patience_counter >= plan.patience[state.syllabus_index]) {
    advance(state, plan);
    ev.advanced = true;
  }
  if (event) *event = ev;
  return state;
}

const SyllabusSpec& current_syllabus(const SchedulerState& state, const CurriculumPlan& plan) {
  if (state.finished) throw StateError("curriculum finished; no current syllabus");
  return plan.syllabuses.at(state.syllabus_index);
}

SchedulerState epoch_boundary(SchedulerState state, const CurriculumPlan& plan) {
  if (plan.advance_on_epoch_end && !state.finished) advance(state, plan);
  return state;
}

void write_event_log_csv(std::ostream& out, std::span<const SchedulerEvent> events) {
  out << "step,loss,syllabus_index,patience_counter,advanced\n";
  char buf[48];
  for (const auto& e : events) {
    std::snprintf(buf, sizeof buf, "%.17g", e.loss);
    out << e.step << ',' << buf << ',' << e.syllabus_index << ',' << e.patience_counter << ','
        << (e.advanced ? 1 : 0) << '\n';
  }
}

}  // namespace sparsecl
