#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "fixtures.hpp"
#include "mapdd/core.hpp"

using namespace mapdd;

namespace {

const Vertex A{0, 0};
const Vertex B{1, 0};

}  // namespace

TEST_CASE("occupancy uses rest-in-place") {
  const SpaceTimePath p{5, {A, B}};
  CHECK(p.at(6) == B);
  CHECK(p.at(99) == B);
  CHECK(p.at(5) == A);
  CHECK_THROWS_AS((void)p.at(4), std::logic_error);
  CHECK(p.length() == 1);
  CHECK(p.end_time() == 6);
}

TEST_CASE("conflict detection") {
  SUBCASE("swap") {
    const auto c = detect_conflict({0, {A, B}}, {0, {B, A}});
    REQUIRE(c);
    CHECK(c->kind == ConflictKind::swap);
    CHECK(c->time == 0);
  }
  SUBCASE("vertex via resting") {
    const auto c = detect_conflict({0, {A}}, {5, {A}});
    REQUIRE(c);
    CHECK(c->kind == ConflictKind::vertex);
    CHECK(c->time == 5);
    CHECK(c->where == A);
  }
  SUBCASE("disjoint corridors") {
    CHECK_FALSE(detect_conflict({0, {{0, 0}, {1, 0}, {2, 0}}}, {0, {{0, 2}, {1, 2}, {2, 2}}}));
  }
  SUBCASE("following is allowed") {
    CHECK_FALSE(detect_conflict({0, {{1, 0}, {2, 0}, {3, 0}}}, {0, {{0, 0}, {1, 0}, {2, 0}}}));
  }
}

TEST_CASE("tardiness") {
  Task t;
  t.delivery_deadline = 12;
  t.completion_time = 10;
  CHECK(tardiness(t).tardiness == 0);
  t.completion_time = 15;
  CHECK(tardiness(t).tardiness == 3);
  CHECK(tardiness(t).failed());
  t.completion_time = 12;
  CHECK(tardiness(t).tardiness == 0);
  CHECK_FALSE(tardiness(t).failed());
  t.completion_time.reset();
  CHECK_THROWS_AS((void)tardiness(t), std::logic_error);
}

TEST_CASE("overwrites only within the dummy span") {
  const SpaceTimePath dummy{3, {{0, 0}, {1, 0}, {2, 0}}};
  CHECK(overwrites({0, {{1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 0}}}, dummy));  // (1,0) at t=4
  CHECK_FALSE(overwrites({0, {{1, 1}}}, dummy));
  CHECK_FALSE(overwrites({6, {{2, 0}}}, dummy));  // arrives after the dummy ends
  CHECK(overwrites({3, {{1, 0}, {0, 0}}}, dummy));  // swap between t=3 and 4
}

TEST_CASE("token reservation queries") {
  const GridMap map = parse_map("mapd-d map v1\n4 1\nE..E\n");
  Token token(map, {{0, 0}, {3, 0}});
  CHECK(token.rester(map.index({0, 0})) == 0);
  CHECK(token.occupant(map.index({3, 0}), 7) == 1);
  CHECK(token.occupant(map.index({3, 0}), 7, 1) == kNoAgent);

  token.set_path(0, {0, {{0, 0}, {1, 0}, {2, 0}}});
  CHECK(token.occupant(map.index({1, 0}), 1) == 0);
  CHECK(token.rester(map.index({2, 0})) == 0);
  CHECK(token.rester(map.index({0, 0})) == kNoAgent);
  CHECK(token.last_transit(map.index({1, 0}), 1) == 1);
  CHECK_FALSE(token.can_rest(map.index({1, 0}), 1, 1));
  CHECK(token.can_rest(map.index({1, 0}), 2, 1));
  // Agent 1 moving (2,0)->(1,0) at t=0 would swap with nobody but lands
  // on agent 0 at t=1.
  CHECK_FALSE(token.move_free(map.index({2, 0}), map.index({1, 0}), 0, 1));
  // Swap check: moving (2,0)->(1,0) at t=1 collides with 0 moving (1,0)->(2,0).
  CHECK_FALSE(token.move_free(map.index({2, 0}), map.index({1, 0}), 1, 1));

  CHECK_FALSE(token.find_violation());
  CHECK_THROWS_AS(token.set_path(1, {0, {{3, 0}, {2, 0}}}), std::logic_error);

  token.advance();
  CHECK(token.now() == 1);
  CHECK(token.location(0) == Vertex{1, 0});
  CHECK_FALSE(token.path_finished(0));
  token.advance();
  CHECK(token.path_finished(0));
  token.clear_path(0);
  CHECK(token.path(0).start_time == 2);
  CHECK(token.rester(map.index({2, 0})) == 0);
}

TEST_CASE("token assignment stays a bijection") {
  const GridMap map = parse_map("mapd-d map v1\n4 1\nET.T\n");
  Token token(map, {{0, 0}});
  Task t;
  t.id = 0;
  t.pickup = {1, 0};
  t.delivery = {3, 0};
  token.add_task(t);
  Task wrong = t;
  wrong.id = 5;
  CHECK_THROWS_AS(token.add_task(wrong), std::logic_error);
  token.assign(0, 0);
  CHECK(token.agent_of(0) == 0);
  CHECK(token.task_of(0) == 0);
  CHECK_THROWS_AS(token.assign(0, 0), std::logic_error);
  token.unassign(0);
  CHECK(token.agent_of(0) == kNoAgent);
}

TEST_CASE("random path pairs: detect_conflict agrees with a timestep scan") {
  Rng rng(9);
  const GridMap map = parse_map("mapd-d map v1\n4 4\n....\n....\n....\n....\n");
  auto walk = [&](Timestep start, int len) {
    SpaceTimePath p{start, {map.vertex(static_cast<VertexIndex>(uniform_int(rng, 0, 15)))}};
    VertexIndex nb[4];
    for (int k = 0; k < len; ++k) {
      const VertexIndex here = map.index(p.back());
      const int c = map.neighbors(here, nb);
      const auto pick = uniform_int(rng, 0, c);
      p.vertices.push_back(pick == c ? p.back() : map.vertex(nb[pick]));
    }
    return p;
  };
  for (int k = 0; k < 2000; ++k) {
    const SpaceTimePath a = walk(uniform_int(rng, 0, 3), static_cast<int>(uniform_int(rng, 0, 6)));
    const SpaceTimePath b = walk(uniform_int(rng, 0, 3), static_cast<int>(uniform_int(rng, 0, 6)));
    REQUIRE(a.is_contiguous());
    std::optional<Timestep> expect;
    const Timestep from = std::max(a.start_time, b.start_time);
    const Timestep to = std::max(a.end_time(), b.end_time());
    for (Timestep t = from; t <= to && !expect; ++t) {
      if (a.at(t) == b.at(t)) expect = t;
      else if (t < to && a.at(t) == b.at(t + 1) && b.at(t) == a.at(t + 1) && a.at(t) != a.at(t + 1)) expect = t;
    }
    const auto got = detect_conflict(a, b);
    CHECK(got.has_value() == expect.has_value());
    if (got && expect) CHECK(got->time == *expect);
    // Symmetric.
    CHECK(detect_conflict(b, a).has_value() == got.has_value());
  }
}
