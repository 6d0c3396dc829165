#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "mapdd/error.hpp"
#include "mapdd/scheduler.hpp"
#include "mapdd/simulator.hpp"

using namespace mapdd;

namespace {

Task make_task(TaskId id, Vertex p, Vertex d, Timestep release, Timestep dd) {
  Task t;
  t.id = id;
  t.pickup = p;
  t.delivery = d;
  t.release_time = release;
  t.delivery_deadline = dd;
  return t;
}

Task with_pickup_deadline(Timestep dp) {
  Task t;
  t.pickup_deadline = dp;
  return t;
}

Instance make_instance(std::shared_ptr<const GridMap> map, std::vector<Vertex> starts, std::vector<Task> tasks) {
  Instance inst;
  inst.name = "hand";
  inst.regime = "hand";
  inst.map_path = "<memory>";
  inst.map = std::move(map);
  inst.agent_starts = std::move(starts);
  inst.tasks = std::move(tasks);
  return inst;
}

std::vector<TraceEvent> events_of(const Trace& trace, EventKind kind) {
  std::vector<TraceEvent> out;
  std::copy_if(trace.begin(), trace.end(), std::back_inserter(out), [&](const TraceEvent& e) { return e.kind == kind; });
  return out;
}

RunOutput traced(const Instance& inst, SchedulerConfig cfg) {
  RunOptions o;
  o.record_trace = true;
  o.check_token = true;
  return run(inst, cfg, 0, o);
}

}  // namespace

TEST_CASE("assignment score") {
  SUBCASE("alpha 0 picks the cheapest") {
    Task t1 = with_pickup_deadline(2);
    Task t2 = with_pickup_deadline(100);
    t1.id = 1;
    t2.id = 2;
    const AssignmentScore s[] = {score_task(t1, 5, 0, 0.0), score_task(t2, 3, 0, 0.0)};
    CHECK(select_best(s) == 2);
  }
  SUBCASE("alpha 1 picks the most urgent") {
    Task t1 = with_pickup_deadline(2);
    Task t2 = with_pickup_deadline(8);
    t1.id = 1;
    t2.id = 2;
    const AssignmentScore s[] = {score_task(t1, 50, 0, 1.0), score_task(t2, 1, 0, 1.0)};
    CHECK(select_best(s) == 1);
  }
  SUBCASE("alpha 0.5 arithmetic") {
    Task t1 = with_pickup_deadline(14);
    Task t2 = with_pickup_deadline(12);
    t1.id = 1;
    t2.id = 2;
    const AssignmentScore a = score_task(t1, 2, 10, 0.5);
    const AssignmentScore b = score_task(t2, 5, 10, 0.5);
    CHECK(a.margin == 4);
    CHECK(a.score == doctest::Approx(3.0));
    CHECK(b.score == doctest::Approx(3.5));
    const AssignmentScore s[] = {b, a};
    CHECK(select_best(s) == 1);
  }
  SUBCASE("negative margins and ties") {
    Task t1 = with_pickup_deadline(-2);
    t1.id = 4;
    CHECK(score_task(t1, 0, 3, 1.0).margin == -5);
    Task t2 = with_pickup_deadline(-2);
    t2.id = 3;
    const AssignmentScore s[] = {score_task(t1, 1, 0, 0.3), score_task(t2, 1, 0, 0.3)};
    CHECK(select_best(s) == 3);
    CHECK(select_best(std::span<const AssignmentScore>{}) == kNoTask);
  }
}

TEST_CASE("switch rule is strict on both terms") {
  CHECK(should_switch(5, 2, 9, 4));
  CHECK_FALSE(should_switch(5, 6, 9, 4));
  CHECK_FALSE(should_switch(9, 2, 9, 4));
  CHECK_FALSE(should_switch(5, 4, 9, 4));
}

TEST_CASE("configuration coherence") {
  CHECK_THROWS_AS(SchedulerConfig::make(Algorithm::tp, 0.3, false, false), InputError);
  CHECK_THROWS_AS(SchedulerConfig::make(Algorithm::tp, 0.0, true, false), InputError);
  CHECK_THROWS_AS(SchedulerConfig::make(Algorithm::dtp, 0.1, false, true), InputError);
  CHECK_THROWS_AS(SchedulerConfig::make(Algorithm::tpts, 0.0, true, true), InputError);
  CHECK_THROWS_AS(SchedulerConfig::make(Algorithm::dtpts, 1.5, true, true), InputError);
  CHECK_THROWS_AS(SchedulerConfig::make(Algorithm::dtpts, -0.1, true, true), InputError);
  CHECK(SchedulerConfig::make(Algorithm::tpts, 0.0, false, false).enable_swap);
  CHECK(SchedulerConfig::make(Algorithm::dtpts, 0.4, true, true).swap_family());
  for (auto a : {Algorithm::tp, Algorithm::dtp, Algorithm::tpts, Algorithm::dtpts}) CHECK(parse_algorithm(to_string(a)) == a);
  CHECK_FALSE(parse_algorithm("cbs"));
}

TEST_CASE("pickup deadlines") {
  const GridMap map = parse_map("mapd-d map v1\n8 1\nT......T\n");
  const DistanceTable dist(map);
  SUBCASE("empty token") {
    World w(map, dist, {}, {make_task(0, {0, 0}, {7, 0}, 0, 20)});
    Scheduler s(w, SchedulerConfig::make(Algorithm::dtp, 0.1, false, false));
    const TaskId ids[] = {0};
    s.update_pickup_deadlines(ids);
    CHECK(w.token.tasks()[0].pickup_deadline == 13);
    REQUIRE(w.token.dummy_path(0));
    CHECK(w.token.dummy_path(0)->length() == 7);
  }
  SUBCASE("infeasible deadline falls back to the free distance") {
    World w(map, dist, {}, {make_task(0, {0, 0}, {7, 0}, 0, 5)});
    Scheduler s(w, SchedulerConfig::make(Algorithm::dtp, 0.1, false, false));
    const TaskId ids[] = {0};
    s.update_pickup_deadlines(ids);
    CHECK(w.token.tasks()[0].pickup_deadline == -2);
    CHECK_FALSE(w.token.dummy_path(0));
  }
  SUBCASE("congested corridor") {
    const GridMap pocket = parse_map("mapd-d map v1\n8 3\nT......T\n@@@.@@@@\n@@@E@@@@\n");
    const DistanceTable pd(pocket);
    World w(pocket, pd, {{3, 2}}, {make_task(0, {0, 0}, {7, 0}, 0, 20)});
    SpaceTimePath crossing{0, std::vector<Vertex>(14, Vertex{3, 2})};
    for (Vertex v : {Vertex{3, 1}, Vertex{3, 0}, Vertex{3, 0}, Vertex{3, 0}, Vertex{3, 1}, Vertex{3, 2}})
      crossing.vertices.push_back(v);
    w.token.set_path(0, crossing);
    Scheduler s(w, SchedulerConfig::make(Algorithm::dtp, 0.1, false, false));
    const TaskId ids[] = {0};
    s.update_pickup_deadlines(ids);
    CHECK(w.token.tasks()[0].pickup_deadline == 11);
  }
}

TEST_CASE("candidate filtering") {
  auto map = fixtures::map_from(fixtures::kSmallWarehouse);
  const DistanceTable dist(*map);
  const std::vector<Task> tasks{make_task(0, {3, 1}, {5, 1}, 0, 50), make_task(1, {7, 1}, {9, 1}, 0, 50),
                                make_task(2, {3, 7}, {5, 7}, 0, 50)};
  SUBCASE("all open tasks") {
    World w(*map, dist, {{0, 1}, {14, 1}}, tasks);
    std::fill(w.status.begin(), w.status.end(), TaskStatus::open);
    Scheduler s(w, SchedulerConfig::make(Algorithm::dtp, 0.0, false, false));
    CHECK(s.candidate_tasks(0) == std::vector<TaskId>{0, 1, 2});
  }
  SUBCASE("another agent rests on a delivery vertex") {
    World w(*map, dist, {{0, 1}, {14, 1}}, tasks);
    std::fill(w.status.begin(), w.status.end(), TaskStatus::open);
    w.token.set_path(1, {0, {{14, 1}, {13, 1}, {12, 1}, {11, 1}, {10, 1}, {9, 1}}});
    Scheduler s(w, SchedulerConfig::make(Algorithm::dtp, 0.0, false, false));
    CHECK(s.candidate_tasks(0) == std::vector<TaskId>{0, 2});
  }
  SUBCASE("assigned but not picked up") {
    for (bool swap : {false, true}) {
      World w(*map, dist, {{0, 1}, {14, 1}}, tasks);
      std::fill(w.status.begin(), w.status.end(), TaskStatus::open);
      w.token.assign(0, 1);
      w.token.set_path(0, {0, {{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}, {6, 1}, {7, 1}, {8, 1}, {9, 1}}});
      Scheduler s(w, SchedulerConfig::make(Algorithm::dtpts, 0.0, swap, !swap));
      const auto c = s.candidate_tasks(1);
      // Swapping keeps task 1 available to agent 1 even though the
      // incumbent's path ends on its delivery vertex.
      CHECK((std::find(c.begin(), c.end(), 1) != c.end()) == swap);
      CHECK(s.in_task_set(1));
      Scheduler plain(w, SchedulerConfig::make(Algorithm::dtp, 0.0, false, false));
      CHECK_FALSE(plain.in_task_set(1));
    }
  }
}

TEST_CASE("lone agent arithmetic") {
  auto map = fixtures::map_from("mapd-d map v1\n8 1\nE..T...T\n");
  for (auto [dd, eps] : {std::pair<Timestep, Timestep>{10, 0}, {5, 2}}) {
    const Instance inst = make_instance(map, {{0, 0}}, {make_task(0, {3, 0}, {7, 0}, 0, dd)});
    for (auto cfg : {SchedulerConfig::make(Algorithm::tp, 0.0, false, false),
                     SchedulerConfig::make(Algorithm::dtpts, 0.2, true, true)}) {
      const RunOutput out = traced(inst, cfg);
      REQUIRE_FALSE(out.result.liveness_failure);
      CHECK(out.result.makespan == 7);
      CHECK(out.result.cumulative_tardiness == eps);
      CHECK(out.result.failure_count == (eps > 0 ? 1 : 0));
      const auto assigns = events_of(out.trace, EventKind::assign);
      REQUIRE(assigns.size() == 1);
      CHECK(assigns[0].time == 0);
      CHECK(validate_trace(out.trace, inst).ok());
    }
  }
  // Released later: assigned at release.
  const Instance late = make_instance(map, {{0, 0}}, {make_task(0, {3, 0}, {7, 0}, 4, 30)});
  const RunOutput out = traced(late, SchedulerConfig::make(Algorithm::dtp, 0.0, false, false));
  CHECK(events_of(out.trace, EventKind::assign).at(0).time == 4);
  CHECK(out.result.makespan == 11);
}

TEST_CASE("a closer agent steals a task that is not yet picked up") {
  // Agent 0 is six cells from the pickup, agent 1 one cell. Agent 0 asks
  // first and takes the task; agent 1 then reaches the pickup earlier.
  auto map = fixtures::map_from("mapd-d map v1\n9 2\nE.....T.T\n.......E.\n");
  const Instance inst = make_instance(map, {{0, 0}, {7, 1}}, {make_task(0, {6, 0}, {8, 0}, 0, 30)});
  const RunOutput swapped = traced(inst, SchedulerConfig::make(Algorithm::dtpts, 0.0, true, false));
  const auto steals = events_of(swapped.trace, EventKind::steal);
  REQUIRE(steals.size() == 1);
  CHECK(steals[0].agent == 1);
  CHECK(steals[0].other_agent == 0);
  CHECK(events_of(swapped.trace, EventKind::deliver).at(0).agent == 1);
  CHECK(validate_trace(swapped.trace, inst).ok());

  const RunOutput plain = traced(inst, SchedulerConfig::make(Algorithm::tp, 0.0, false, false));
  CHECK(events_of(plain.trace, EventKind::steal).empty());
  CHECK(swapped.result.makespan < plain.result.makespan);
}

TEST_CASE("task switching on release") {
  // Agent 0 heads for a far pickup; at t=2 a task appears whose pickup is
  // closer and whose pickup deadline is earlier.
  auto map = fixtures::map_from("mapd-d map v1\n12 2\nE..T.......T\n......T.....\n");
  const Instance inst =
      make_instance(map, {{0, 0}}, {make_task(0, {11, 0}, {6, 1}, 0, 80),
                                    make_task(1, {3, 0}, {6, 1}, 2, 12)});
  const RunOutput out = traced(inst, SchedulerConfig::make(Algorithm::dtpts, 0.0, false, true));
  const auto sw = events_of(out.trace, EventKind::switch_task);
  REQUIRE(sw.size() == 1);
  CHECK(sw[0].time == 2);
  CHECK(sw[0].agent == 0);
  CHECK(sw[0].task == 0);
  CHECK(sw[0].other_task == 1);
  CHECK(validate_trace(out.trace, inst).ok());
  CHECK(out.result.completed == 2);

  const RunOutput none = traced(inst, SchedulerConfig::make(Algorithm::dtpts, 0.0, false, false));
  CHECK(events_of(none.trace, EventKind::switch_task).empty());
}

TEST_CASE("an assignment crossing a dummy path triggers a recompute") {
  // Task 1's dummy path ends at (4,0), where the agent will rest after task 0.
  auto map = fixtures::map_from("mapd-d map v1\n9 1\nE.T.T.T.T\n");
  const Instance inst =
      make_instance(map, {{0, 0}}, {make_task(0, {2, 0}, {4, 0}, 0, 40), make_task(1, {8, 0}, {4, 0}, 0, 20)});
  const RunOutput out = traced(inst, SchedulerConfig::make(Algorithm::dtp, 0.0, false, false));
  std::vector<TraceEvent> t1;
  for (const auto& e : events_of(out.trace, EventKind::deadline_update))
    if (e.task == 1 && e.time == 0) t1.push_back(e);
  REQUIRE(t1.size() == 2);
  CHECK(t1[0].dummy_length == 4);
  CHECK(t1[0].pickup_deadline == 16);
  CHECK(t1[1].dummy_length == -1);  // the delivery vertex is now held forever
  CHECK(t1[1].pickup_deadline == 16);
  CHECK(validate_trace(out.trace, inst).ok());
}

TEST_CASE("degenerate configurations coincide") {
  auto map = std::make_shared<const GridMap>(load_map(fixtures::asset("warehouse.map")));
  for (std::uint64_t seed : {1, 2}) {
    const Instance inst = generate({"warehouse.map", 15, 60, ReleaseRegime::dense, DeadlineRegime::short_deadline, seed}, map);
    RunOptions o;
    o.record_trace = true;
    const auto tp = run(inst, SchedulerConfig::make(Algorithm::tp, 0.0, false, false), 0, o);
    const auto dtp = run(inst, SchedulerConfig::make(Algorithm::dtp, 0.0, false, false), 0, o);
    const auto bare = run(inst, SchedulerConfig::make(Algorithm::dtpts, 0.0, false, false), 0, o);
    CHECK(format_trace(tp.trace) == format_trace(dtp.trace));
    CHECK(format_trace(tp.trace) == format_trace(bare.trace));
  }
}
