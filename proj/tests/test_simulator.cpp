#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "mapdd/simulator.hpp"
#include "mapdd/sweep.hpp"

using namespace mapdd;

namespace {

const Instance& warehouse_instance() {
  static const Instance inst = [] {
    GenSpec s;
    s.map_path = fixtures::asset("warehouse.map");
    s.seed = 4;
    return generate(s, std::make_shared<const GridMap>(load_map(s.map_path)));
  }();
  return inst;
}

bool mentions(const ValidationReport& rep, const std::string& what) {
  return std::any_of(rep.violations.begin(), rep.violations.end(),
                     [&](const std::string& v) { return v.find(what) != std::string::npos; });
}

}  // namespace

TEST_CASE("warehouse runs deliver every task and replay cleanly") {
  const Instance& inst = warehouse_instance();
  const DistanceTable dist(*inst.map);
  RunOptions opts;
  opts.record_trace = true;
  for (const auto& cfg : {SchedulerConfig::make(Algorithm::tp, 0.0, false, false),
                          SchedulerConfig::make(Algorithm::dtp, 0.1, false, false),
                          SchedulerConfig::make(Algorithm::tpts, 0.0, true, false),
                          SchedulerConfig::make(Algorithm::dtpts, 0.05, true, true)}) {
    CAPTURE(to_string(cfg.algorithm));
    const RunOutput out = run(inst, cfg, 1, opts, dist);
    const RunResult& r = out.result;
    CHECK_FALSE(r.liveness_failure);
    CHECK(r.completed == 151);
    REQUIRE(r.per_task.size() == 151);
    Timestep sum = 0;
    int failed = 0;
    for (std::size_t j = 0; j < r.per_task.size(); ++j) {
      sum += r.per_task[j].tardiness;
      failed += r.per_task[j].failed() ? 1 : 0;
    }
    CHECK(sum == r.cumulative_tardiness);
    CHECK(failed == r.failure_count);
    CHECK(r.makespan <= r.steps);

    const ValidationReport rep = validate_trace(out.trace, inst);
    CHECK(rep.ok());
    CHECK(rep.delivered == 151);
    CHECK(rep.cumulative_tardiness == r.cumulative_tardiness);
    CHECK(rep.failure_count == r.failure_count);
    CHECK(rep.makespan == r.makespan);
  }
}

TEST_CASE("a tiny step cap is reported as a liveness failure") {
  RunOptions opts;
  opts.step_cap = 5;
  const RunOutput out = run(warehouse_instance(), SchedulerConfig::make(Algorithm::dtp, 0.0, false, false), 1, opts);
  CHECK(out.result.liveness_failure);
  CHECK(out.result.completed < 151);
}

TEST_CASE("validation catches injected faults") {
  const Instance& inst = warehouse_instance();
  RunOptions opts;
  opts.record_trace = true;
  const Trace trace = run(inst, SchedulerConfig::make(Algorithm::dtp, 0.0, false, false), 1, opts).trace;
  REQUIRE(validate_trace(trace, inst).ok());

  SUBCASE("teleport") {
    Trace bad = trace;
    auto it = std::find_if(bad.begin(), bad.end(),
                           [](const TraceEvent& e) { return e.kind == EventKind::move && e.from != e.to; });
    REQUIRE(it != bad.end());
    it->to = Vertex{it->from.x + 2, it->from.y};
    CHECK(mentions(validate_trace(bad, inst), "jumps"));
  }
  SUBCASE("shared cell") {
    // Point agent 1's first move onto agent 0's destination.
    Trace bad = trace;
    auto first = [&](AgentId a) {
      return std::find_if(bad.begin(), bad.end(),
                          [&](const TraceEvent& e) { return e.kind == EventKind::move && e.agent == a; });
    };
    auto m0 = first(0);
    auto m1 = first(1);
    REQUIRE(m0 != bad.end());
    REQUIRE(m1 != bad.end());
    REQUIRE(m0->time == m1->time);
    m1->to = m0->to;
    CHECK(mentions(validate_trace(bad, inst), "vertex conflict"));
  }
  SUBCASE("wrong tardiness") {
    Trace bad = trace;
    auto it = std::find_if(bad.begin(), bad.end(), [](const TraceEvent& e) { return e.kind == EventKind::deliver; });
    REQUIRE(it != bad.end());
    it->tardiness += 1;
    CHECK(mentions(validate_trace(bad, inst), "tardiness mismatch"));
  }
  SUBCASE("missing delivery") {
    Trace bad = trace;
    auto it = std::find_if(bad.begin(), bad.end(), [](const TraceEvent& e) { return e.kind == EventKind::deliver; });
    REQUIRE(it != bad.end());
    bad.erase(it);
    CHECK(mentions(validate_trace(bad, inst), "never delivered"));
  }
}

TEST_CASE("trace text round-trips") {
  RunOptions opts;
  opts.record_trace = true;
  const Trace trace =
      run(warehouse_instance(), SchedulerConfig::make(Algorithm::dtpts, 0.1, true, true), 2, opts).trace;
  std::istringstream in(format_trace(trace));
  CHECK(read_trace(in) == trace);

  std::istringstream broken("{\"t\":0,\"ev\":\"release\",\"task\":0}\n{\"t\":1,\"ev\":\"teleport\"}\n");
  try {
    (void)read_trace(broken);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("results rows round-trip and summarize") {
  std::vector<SweepRow> rows;
  for (int k = 0; k < 4; ++k) {
    SweepRow r;
    r.instance_id = "dense-short-s" + std::to_string(k + 1);
    r.regime = "dense-short";
    r.algo = "dtpts";
    r.alpha = 0.025;
    r.swap = true;
    r.switching = k % 2 == 0;
    r.seed = static_cast<std::uint64_t>(k + 1);
    r.cumulative_tardiness = 100 * k;
    r.failure_count = k;
    r.makespan = 400 + k;
    r.wall_ms = 12.5;
    r.status = k == 3 ? "liveness" : "ok";
    rows.push_back(r);
  }
  std::string text = csv_header() + "\n";
  for (const auto& r : rows) text += format_row(r) + "\n";
  std::istringstream in(text);
  const auto back = read_rows(in);
  REQUIRE(back.size() == rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(back[k].key() == rows[k].key());
    CHECK(format_row(back[k]) == format_row(rows[k]));
  }

  const auto summary = summarize(rows);
  REQUIRE(summary.size() == 2);
  for (const auto& s : summary) {
    CHECK(s.runs == 2);
    if (s.switching) {
      CHECK(s.mean_tardiness == doctest::Approx(100.0));  // k = 0, 2
    } else {
      CHECK(s.mean_tardiness == doctest::Approx(200.0));  // k = 1, 3
      CHECK(s.liveness_failures == 1);
    }
  }
}
