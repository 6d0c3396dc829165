#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "mapdd/core.hpp"
#include "mapdd/instance.hpp"
#include "mapdd/planner.hpp"
#include "mapdd/scheduler.hpp"
#include "mapdd/trace.hpp"

namespace mapdd {

struct RunOptions {
  /// 0 selects 10 * (release span + tasks * map diameter).
  Timestep step_cap = 0;
  bool record_trace = false;
  /// Re-check pairwise conflict-freedom of the token after every timestep
  /// (quadratic; meant for tests). A violation throws std::logic_error.
  bool check_token = false;
  PlannerOptions planner;
};

struct RunResult {
  Timestep cumulative_tardiness = 0;
  int failure_count = 0;
  Timestep makespan = 0;
  /// Indexed by task id.
  std::vector<TardinessRecord> per_task;
  std::chrono::duration<double, std::milli> wall_time{0};
  bool liveness_failure = false;
  Timestep steps = 0;
  int completed = 0;
  Scheduler::Counters counters;
};

struct RunOutput {
  RunResult result;
  Trace trace;
};

Timestep default_step_cap(const Instance& inst, const DistanceTable& dist);

/// Simulates until every task is delivered and all agents are idle, or the
/// step cap is hit (result.liveness_failure). Per timestep: release, pickup
/// deadlines of new tasks, task switching, token requests, synchronized
/// motion, pickup/delivery detection. The simulation itself draws no random
/// numbers; `seed` is carried for bookkeeping only.
RunOutput run(const Instance& inst, const SchedulerConfig& cfg, std::uint64_t seed, const RunOptions& options,
              const DistanceTable& dist);
RunOutput run(const Instance& inst, const SchedulerConfig& cfg, std::uint64_t seed, const RunOptions& options = {});

struct ValidationReport {
  std::vector<std::string> violations;
  Timestep cumulative_tardiness = 0;
  int failure_count = 0;
  Timestep makespan = 0;
  int delivered = 0;

  bool ok() const { return violations.empty(); }
};

/// Replays a trace against its instance from scratch: per-timestep vertex
/// and swap conflicts, move adjacency and continuity, assignment ownership,
/// pickup-before-delivery at the right vertices, and recomputed metrics.
ValidationReport validate_trace(const Trace& trace, const Instance& inst);

}  // namespace mapdd
