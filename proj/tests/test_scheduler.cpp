#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "sparsecl/errors.hpp"
#include "sparsecl/scheduler.hpp"

using namespace sparsecl;

namespace {

std::vector<SyllabusSpec> dummy_syllabuses(std::size_t n) {
  std::vector<SyllabusSpec> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({n - i, 2, {i + 1, i + 1}});
  out.back() = identity_syllabus({n, n});
  return out;
}

// Straight re-statement of the advancement rule, kept separate from the library.
struct RefScheduler {
  double lambda;
  std::vector<std::size_t> patience;
  bool cumulative;
  std::size_t index = 0, counter = 0;
  bool has_prev = false, finished = false;
  double prev = 0.0;

  void feed(double loss) {
    const bool violation = has_prev && loss > lambda * prev;
    if (violation) ++counter;
    else if (!cumulative) counter = 0;
    prev = loss;
    has_prev = true;
    if (counter >= patience[index]) {
      counter = 0;
      has_prev = false;
      if (index + 1 == patience.size()) finished = true;
      else ++index;
    }
  }
};

}  // namespace

TEST_CASE("hand trace: lambda 0.99, P 2, consecutive") {
  const CurriculumPlan plan = make_plan(dummy_syllabuses(3), 2, 0.99);
  SchedulerState s = new_state(plan);
  const double losses[] = {1.0, 0.95, 0.949, 0.9489};
  std::vector<SchedulerEvent> ev(4);
  for (int i = 0; i < 4; ++i) s = record_loss(s, plan, losses[i], &ev[i]);
  CHECK(!ev[0].violation);
  CHECK(!ev[1].violation);
  CHECK(ev[2].violation);
  CHECK(ev[3].violation);
  CHECK(!ev[2].advanced);
  CHECK(ev[3].advanced);
  CHECK(ev[3].patience_counter == 2);
  CHECK(ev[3].syllabus_index == 0);
  CHECK(s.syllabus_index == 1);
  CHECK(s.patience_counter == 0);
  CHECK(s.window_start == 4);
  CHECK(s.train_history.size() == 4);
}

TEST_CASE("first step of a new syllabus is never a violation") {
  const CurriculumPlan plan = make_plan(dummy_syllabuses(3), 1, 0.5);
  SchedulerState s = new_state(plan);
  s = record_loss(s, plan, 1.0);
  s = record_loss(s, plan, 5.0);
  REQUIRE(s.syllabus_index == 1);
  SchedulerEvent e;
  s = record_loss(s, plan, 100.0, &e);
  CHECK(!e.violation);
  CHECK(s.syllabus_index == 1);
}

TEST_CASE("consecutive vs cumulative") {
  const double losses[] = {1.0, 2.0, 1.0, 2.0, 1.0, 2.0};
  auto plan = make_plan(dummy_syllabuses(2), 3, 1.0, PatienceMode::consecutive);
  SchedulerState s = new_state(plan);
  for (double l : losses) s = record_loss(s, plan, l);
  CHECK(s.syllabus_index == 0);
  CHECK(s.patience_counter == 1);

  plan.mode = PatienceMode::cumulative;
  s = new_state(plan);
  for (double l : losses) s = record_loss(s, plan, l);
  CHECK(s.syllabus_index == 1);
}

TEST_CASE("finishing and errors") {
  const CurriculumPlan plan = make_plan(dummy_syllabuses(2), 1, 0.9);
  SchedulerState s = new_state(plan);
  CHECK(current_syllabus(s, plan) == plan.syllabuses[0]);
  for (double l : {1.0, 2.0, 1.0, 2.0}) s = record_loss(s, plan, l);
  CHECK(s.finished);
  CHECK(s.syllabus_index == 1);  // stays on the last syllabus
  CHECK_THROWS_AS(record_loss(s, plan, 1.0), StateError);
  CHECK_THROWS_AS(current_syllabus(s, plan), StateError);

  SchedulerState fresh = new_state(plan);
  CHECK_THROWS_AS(record_loss(fresh, plan, -1.0), ConfigError);
  CHECK_THROWS_AS(record_loss(fresh, plan, std::nan("")), ConfigError);
  CHECK_THROWS_AS(record_loss(fresh, plan, INFINITY), ConfigError);
}

TEST_CASE("plan validation") {
  CHECK_THROWS_AS(make_plan({}, 1, 0.9), ConfigError);
  CHECK_THROWS_AS(make_plan(dummy_syllabuses(2), 0, 0.9), ConfigError);
  CHECK_THROWS_AS(make_plan(dummy_syllabuses(2), 1, 1.5), ConfigError);
  CHECK_THROWS_AS(make_plan(dummy_syllabuses(2), 1, -0.1), ConfigError);
  CurriculumPlan p = make_plan(dummy_syllabuses(2), 1, 0.9);
  p.patience.push_back(3);
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("epoch boundary") {
  CurriculumPlan plan = make_plan(dummy_syllabuses(2), 10, 0.9);
  SchedulerState s = new_state(plan);
  s = record_loss(s, plan, 1.0);
  CHECK(epoch_boundary(s, plan) == s);
  plan.advance_on_epoch_end = true;
  s = epoch_boundary(s, plan);
  CHECK(s.syllabus_index == 1);
  CHECK(s.window_start == 1);
  s = epoch_boundary(s, plan);
  CHECK(s.finished);
}

// With the rule loss > lambda * prev, lambda = 1 is the setting under which any
// decrease is acceptable; lambda = 0 flags every positive loss.
TEST_CASE("lambda 1 never advances on decreasing losses") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const CurriculumPlan plan = make_plan(dummy_syllabuses(3), 1 + trial % 4, 1.0);
    SchedulerState s = new_state(plan);
    double loss = 1.0 + 100.0 * frac(rng);
    for (int step = 0; step < 60; ++step) {
      s = record_loss(s, plan, loss);
      REQUIRE(s.patience_counter == 0);
      REQUIRE(s.syllabus_index == 0);
      loss *= 0.5 + 0.49 * frac(rng);
    }
  }
}

TEST_CASE("lambda 0 counts every positive loss after the first") {
  const CurriculumPlan plan = make_plan(dummy_syllabuses(2), 3, 0.0);
  SchedulerState s = new_state(plan);
  std::vector<SchedulerEvent> ev(4);
  const double losses[] = {4.0, 2.0, 1.0, 0.5};
  for (int i = 0; i < 4; ++i) s = record_loss(s, plan, losses[i], &ev[i]);
  CHECK(!ev[0].violation);
  CHECK(ev[1].violation);
  CHECK(ev[3].advanced);
  CHECK(s.syllabus_index == 1);
}

TEST_CASE("single syllabus, P 1, lambda 1") {
  const CurriculumPlan plan = make_plan({identity_syllabus({4, 4})}, 1, 1.0);
  SchedulerState s = new_state(plan);
  s = record_loss(s, plan, 1.0);
  s = record_loss(s, plan, 1.0);
  CHECK(!s.finished);  // 1.0 > 1.0 is false
  s = record_loss(s, plan, 1.01);
  CHECK(s.finished);
}

TEST_CASE("randomized sequences: reference agreement, monotone index, replay") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + trial % 5;
    CurriculumPlan plan = make_plan(dummy_syllabuses(n), 1, 0.9 + 0.1 * frac(rng),
                                    trial % 2 ? PatienceMode::cumulative : PatienceMode::consecutive);
    for (auto& p : plan.patience) p = 1 + rng() % 5;
    RefScheduler ref{plan.lambda, plan.patience, plan.mode == PatienceMode::cumulative};

    std::vector<double> losses;
    for (int i = 0; i < 150; ++i) losses.push_back(0.1 + 10.0 * frac(rng));

    SchedulerState s = new_state(plan);
    std::vector<SchedulerEvent> events;
    for (double l : losses) {
      if (s.finished) break;
      const std::size_t before = s.syllabus_index;
      SchedulerEvent e;
      s = record_loss(s, plan, l, &e);
      events.push_back(e);
      ref.feed(l);
      REQUIRE(s.syllabus_index >= before);
      REQUIRE(s.syllabus_index <= before + 1);
      REQUIRE(s.syllabus_index == ref.index);
      REQUIRE(s.patience_counter == ref.counter);
      REQUIRE(s.finished == ref.finished);
    }

    SchedulerState replay = new_state(plan);
    std::vector<SchedulerEvent> replay_events;
    for (std::size_t i = 0; i < events.size(); ++i) {
      SchedulerEvent e;
      replay = record_loss(replay, plan, losses[i], &e);
      replay_events.push_back(e);
    }
    REQUIRE(replay == s);
    std::ostringstream a, b;
    write_event_log_csv(a, events);
    write_event_log_csv(b, replay_events);
    REQUIRE(a.str() == b.str());
  }
}

TEST_CASE("event log csv") {
  const CurriculumPlan plan = make_plan(dummy_syllabuses(3), 2, 0.99);
  SchedulerState s = new_state(plan);
  std::vector<SchedulerEvent> ev(4);
  const double losses[] = {1.0, 0.95, 0.949, 0.9489};
  for (int i = 0; i < 4; ++i) s = record_loss(s, plan, losses[i], &ev[i]);
  std::ostringstream os;
  write_event_log_csv(os, ev);
  const std::string csv = os.str();
  CHECK(csv.rfind("step,loss,syllabus_index,patience_counter,advanced\n", 0) == 0);
  CHECK(csv.find("\n4,0.948") != std::string::npos);
  CHECK(csv.substr(csv.size() - 2) == "1\n");
}
