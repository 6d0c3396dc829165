#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mapdd/core.hpp"
#include "mapdd/grid_map.hpp"

namespace mapdd {

struct PlannerOptions {
  /// Timesteps a single leg may span beyond its start (plus, for a final
  /// leg, beyond the last transit of its goal). 0 selects 4 * (width + height).
  Timestep leg_budget = 0;
  /// Nearest candidate endpoints tried by plan_relocation.
  int relocation_attempts = 8;
};

/// Forward request: visit `waypoints` in order starting from `origin` at
/// `start_time`, then rest at the last waypoint. `agent` is ignored in the
/// reservation lookups (its own old path is being replaced).
struct PlanRequest {
  AgentId agent = kNoAgent;
  Vertex origin;
  std::vector<Vertex> waypoints;
  Timestep start_time = 0;
};

struct PlannedPath {
  SpaceTimePath path;
  /// Arrival timestep at each waypoint.
  std::vector<Timestep> arrivals;
};

/// Reverse-time request for a dummy path: leave `origin` (the delivery
/// vertex) at `end_time` and walk backwards until `target` (the pickup
/// vertex) is reached, never earlier than `earliest_time`.
struct ReversePlanRequest {
  Vertex origin;
  Vertex target;
  Timestep end_time = 0;
  Timestep earliest_time = 0;
};

/// Space-time A* over the token's reservations.
///
/// Heuristic is the exact free-space distance. Open-list order: lower f,
/// then later g, then lower vertex index (y * width + x). Successors are
/// generated in the order wait, up, down, left, right and the first
/// generator of a state is its parent; since every edge costs one timestep
/// the g of a state is fixed, so this is enough for a deterministic result.
///
/// A Planner owns scratch buffers; use one per thread.
class Planner {
 public:
  Planner(const GridMap& map, const DistanceTable& dist, PlannerOptions options = {});

  std::optional<PlannedPath> plan_path(const PlanRequest& req, const Token& token);
  std::optional<SpaceTimePath> plan_reverse(const ReversePlanRequest& req, const Token& token);
  /// Path for an idle agent to the nearest endpoint that is neither
  /// forbidden (indexed by VertexIndex) nor the resting vertex of another
  /// agent, and where it can then rest indefinitely.
  std::optional<SpaceTimePath> plan_relocation(AgentId agent, const Token& token, const std::vector<char>& forbidden);

  Timestep leg_budget() const { return leg_budget_; }
  /// Number of states expanded since construction (profiling aid).
  std::uint64_t expansions() const { return expansions_; }

 private:
  struct Node {
    std::int32_t f;
    std::int32_t g;
    VertexIndex v;
  };

  // Returns cells from origin to goal, one per timestep.
  bool search_leg(AgentId self, VertexIndex origin, Timestep start, VertexIndex goal, bool rest_at_goal,
                  const Token& token, std::vector<VertexIndex>& out);
  void reset_scratch(std::size_t layers);
  std::size_t slot(std::int32_t g, VertexIndex v) const {
    return static_cast<std::size_t>(g) * static_cast<std::size_t>(num_cells_) + static_cast<std::size_t>(v);
  }

  const GridMap* map_;
  const DistanceTable* dist_;
  PlannerOptions options_;
  Timestep leg_budget_;
  int num_cells_;

  std::vector<std::uint32_t> stamp_;
  std::vector<VertexIndex> parent_;
  std::uint32_t generation_ = 0;
  std::vector<Node> heap_;
  std::uint64_t expansions_ = 0;
};

}  // namespace mapdd
