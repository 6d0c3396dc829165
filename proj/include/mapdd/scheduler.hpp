#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mapdd/core.hpp"
#include "mapdd/planner.hpp"
#include "mapdd/trace.hpp"

namespace mapdd {

enum class Algorithm : std::uint8_t { tp, dtp, tpts, dtpts };

std::string_view to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);

struct SchedulerConfig {
  Algorithm algorithm = Algorithm::dtp;
  double alpha = 0.0;
  bool enable_swap = false;
  bool enable_switch = false;

  /// Validates and normalizes a configuration; throws InputError when the
  /// combination is incoherent (tp/tpts with alpha != 0, switching or
  /// swapping on the tp/dtp family, alpha outside [0, 1]).
  /// tpts always swaps.
  static SchedulerConfig make(Algorithm algorithm, double alpha, bool swap, bool switching);

  /// tpts and dtpts: tasks stay in the task set until picked up.
  bool swap_family() const { return algorithm == Algorithm::tpts || algorithm == Algorithm::dtpts; }
};

struct AssignmentScore {
  TaskId task = kNoTask;
  Timestep margin = 0;  // d_p - t
  int cost = 0;         // h(loc, v_p)
  double score = 0.0;   // alpha * margin + (1 - alpha) * cost
};

AssignmentScore score_task(const Task& task, int cost, Timestep now, double alpha);

/// Lowest score, ties to the lower task id. Returns kNoTask for an empty set.
TaskId select_best(std::span<const AssignmentScore> scores);

/// Both strict inequalities: earlier pickup deadline and cheaper to reach.
bool should_switch(Timestep new_pickup_deadline, int new_cost, Timestep cur_pickup_deadline, int cur_cost);

enum class TaskStatus : std::uint8_t { unreleased, open, executing, delivered };

/// Mutable per-run state shared by the scheduler and the simulator.
struct World {
  World(const GridMap& map, const DistanceTable& dist, const std::vector<Vertex>& starts, std::vector<Task> tasks);

  const GridMap* map;
  const DistanceTable* dist;
  Token token;
  std::vector<AgentState> agents;
  std::vector<TaskStatus> status;
  Trace* trace = nullptr;

  void emit(const TraceEvent& e) {
    if (trace != nullptr) trace->push_back(e);
  }
  int h(Vertex from, Vertex to) const { return (*dist)(map->index(from), map->index(to)); }
};

/// Token-passing schedulers: TP and D-TP (single pass per requesting agent,
/// tasks leave the task set on assignment) and TPTS / D-TPTS (tasks stay
/// until pickup and may be stolen by an agent that reaches the pickup
/// vertex strictly earlier; optional task switching on release).
class Scheduler {
 public:
  Scheduler(World& world, SchedulerConfig cfg, PlannerOptions planner_options = {});

  /// One timestep of the algorithm for the tasks released at world.token.now().
  void step(std::span<const TaskId> released);

  /// Plans each task's dummy path backwards from its delivery deadline and
  /// sets d_p = d_d - |dummy path|; falls back to d_d - h(v_d, v_p) when the
  /// reverse search fails.
  void update_pickup_deadlines(std::span<const TaskId> tasks);

  /// Tasks agent a may take now (T'): in the task set, and neither endpoint
  /// is where another agent's path ends. With swapping, tasks assigned to
  /// another agent but not yet picked up stay eligible; the incumbent's own
  /// path end does not exclude them.
  std::vector<TaskId> candidate_tasks(AgentId a) const;

  /// Scores candidates for agent a at the current time.
  std::vector<AssignmentScore> score_candidates(AgentId a, std::span<const TaskId> candidates) const;

  /// Switch decision for an agent heading to its pickup (no side effects).
  bool task_switch_check(AgentId a, TaskId new_task) const;

  /// Whether task j is in the unexecuted task set.
  bool in_task_set(TaskId j) const;

  const SchedulerConfig& config() const { return cfg_; }
  Planner& planner() { return planner_; }

  struct Counters {
    std::uint64_t assignments = 0;
    std::uint64_t steals = 0;
    std::uint64_t switches = 0;
    std::uint64_t relocations = 0;
    std::uint64_t plan_failures = 0;
    std::uint64_t deadline_updates = 0;
  };
  const Counters& counters() const { return counters_; }

 private:
  void apply_switches(std::span<const TaskId> released);
  void serve_requests();
  void serve_dtp(AgentId a);
  void serve_dtpts(AgentId a);
  bool try_assign(AgentId a, TaskId j);
  bool try_steal(AgentId a, TaskId j);
  void resolve_deadlock_or_stay(AgentId a);
  void refresh_overwritten();
  void commit_assignment(AgentId a, TaskId j, PlannedPath planned);

  World* w_;
  SchedulerConfig cfg_;
  Planner planner_;
  std::vector<AgentId> written_;  // paths written during the current request
  std::vector<char>* served_ = nullptr;
  Counters counters_;
};

}  // namespace mapdd
