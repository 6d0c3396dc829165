#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "mapdd/grid_map.hpp"

namespace mapdd {

/// Signed so that pickup-deadline margins can go negative; the clock itself
/// never does.
using Timestep = std::int64_t;
using AgentId = int;
using TaskId = int;

inline constexpr AgentId kNoAgent = -1;
inline constexpr TaskId kNoTask = -1;

struct Task {
  TaskId id = kNoTask;
  Vertex pickup;
  Vertex delivery;
  Timestep release_time = 0;
  Timestep delivery_deadline = 0;
  std::optional<Timestep> pickup_deadline;
  std::optional<Timestep> completion_time;

  friend bool operator==(const Task&, const Task&) = default;
};

struct TardinessRecord {
  TaskId task = kNoTask;
  Timestep tardiness = 0;

  bool failed() const { return tardiness > 0; }
  friend bool operator==(const TardinessRecord&, const TardinessRecord&) = default;
};

/// max(0, completion - delivery deadline). Throws std::logic_error when the
/// task has not been completed.
TardinessRecord tardiness(const Task& task);

enum class Phase : std::uint8_t { idle, to_pickup, to_delivery, relocating };

struct AgentState {
  AgentId id = kNoAgent;
  Phase phase = Phase::idle;
  TaskId assigned_task = kNoTask;
  /// Timestep at which the current path reaches the pickup vertex.
  Timestep pickup_time = 0;
};

/// One vertex per timestep, starting at start_time. Length counts moves
/// (waits included), i.e. vertices.size() - 1.
struct SpaceTimePath {
  Timestep start_time = 0;
  std::vector<Vertex> vertices;

  Timestep length() const { return static_cast<Timestep>(vertices.size()) - 1; }
  Timestep end_time() const { return start_time + length(); }
  Vertex front() const { return vertices.front(); }
  Vertex back() const { return vertices.back(); }

  /// Rest-in-place occupancy: the final vertex is held for every later
  /// timestep. Throws std::logic_error for t before start_time.
  Vertex at(Timestep t) const;

  /// Consecutive vertices identical or adjacent.
  bool is_contiguous() const;

  friend bool operator==(const SpaceTimePath&, const SpaceTimePath&) = default;
};

SpaceTimePath trivial_path(Vertex v, Timestep t);

enum class ConflictKind : std::uint8_t { vertex, swap };

struct Conflict {
  ConflictKind kind;
  /// Vertex conflict: both at `where` at `time`. Swap conflict: the
  /// exchange happens between `time` and `time + 1`.
  Timestep time;
  Vertex where;

  friend bool operator==(const Conflict&, const Conflict&) = default;
};

/// Earliest vertex or swapping conflict between two paths under
/// rest-in-place semantics. Timesteps before either path starts are not
/// compared.
std::optional<Conflict> detect_conflict(const SpaceTimePath& a, const SpaceTimePath& b);

/// True when `real` (extended by rest-in-place) collides with `dummy` at any
/// timestep within the dummy's own span. Dummy paths are not extended.
bool overwrites(const SpaceTimePath& real, const SpaceTimePath& dummy);

/// Shared memory of the token-passing family: reserved agent paths, dummy
/// paths, task set and assignments.
///
/// Agent paths are mirrored in a reservation table so that vertex/edge
/// queries are O(1): per-timestep rows for the moving part of each path and
/// a rest table for final vertices. Rows cover [now, now + rows).
class Token {
 public:
  Token(const GridMap& map, const std::vector<Vertex>& starts, Timestep now = 0);

  const GridMap& map() const { return *map_; }
  Timestep now() const { return now_; }
  std::size_t num_agents() const { return paths_.size(); }

  const SpaceTimePath& path(AgentId a) const { return paths_[a]; }
  /// Vertex held by agent a at t (rest-in-place beyond the path end).
  Vertex occupancy(AgentId a, Timestep t) const;
  Vertex location(AgentId a) const { return occupancy(a, now_); }
  /// The path's final vertex has been reached by now.
  bool path_finished(AgentId a) const { return paths_[a].end_time() <= now_; }

  /// Replaces agent a's reservation. The path must cover now.
  void set_path(AgentId a, SpaceTimePath path);
  /// Replaces agent a's reservation with resting at its current location.
  void clear_path(AgentId a);
  /// Moves the clock forward one timestep.
  void advance();

  // Reservation queries, all ignoring agent `self`.
  /// Agent occupying v at t (moving or resting), or kNoAgent.
  AgentId occupant(VertexIndex v, Timestep t, AgentId self = kNoAgent) const;
  /// Moving from `from` at t to `to` at t+1 collides with nobody.
  bool move_free(VertexIndex from, VertexIndex to, Timestep t, AgentId self) const;
  /// Agent whose path ends at v (resting there indefinitely), or kNoAgent.
  AgentId rester(VertexIndex v) const { return rest_[v].agent; }
  /// Time from which rester(v) holds v; meaningless without a rester.
  Timestep rest_since(VertexIndex v) const { return rest_[v].since; }
  /// Latest timestep at which some agent other than self passes through v
  /// (resting excluded); -1 if none in the reserved future.
  Timestep last_transit(VertexIndex v, AgentId self) const;
  /// Resting at v forever from time t on is free of other agents.
  bool can_rest(VertexIndex v, Timestep t, AgentId self) const;

  // Task bookkeeping.
  std::vector<Task>& tasks() { return tasks_; }
  const std::vector<Task>& tasks() const { return tasks_; }
  /// Adds a released task; ids must be dense and in order of insertion.
  void add_task(const Task& task);

  const std::optional<SpaceTimePath>& dummy_path(TaskId j) const { return dummy_paths_[j]; }
  void set_dummy_path(TaskId j, std::optional<SpaceTimePath> p) { dummy_paths_[j] = std::move(p); }

  AgentId agent_of(TaskId j) const { return task_agent_[j]; }
  TaskId task_of(AgentId a) const { return agent_task_[a]; }
  void assign(AgentId a, TaskId j);
  void unassign(AgentId a);

  /// Checks pairwise conflict-freedom of all agent paths from now on.
  /// Returns a description of the first violation, if any.
  std::optional<std::string> find_violation() const;

 private:
  struct Rest {
    AgentId agent = kNoAgent;
    Timestep since = 0;
  };

  std::int16_t* row(Timestep t);
  const std::int16_t* row(Timestep t) const;
  void ensure_rows(Timestep last);
  void reserve(AgentId a, const SpaceTimePath& p);
  void release(AgentId a, const SpaceTimePath& p);

  const GridMap* map_;
  Timestep now_;
  std::vector<SpaceTimePath> paths_;
  std::deque<std::vector<std::int16_t>> rows_;
  std::vector<Rest> rest_;

  std::vector<Task> tasks_;
  std::vector<std::optional<SpaceTimePath>> dummy_paths_;
  std::vector<AgentId> task_agent_;
  std::vector<TaskId> agent_task_;
};

}  // namespace mapdd
