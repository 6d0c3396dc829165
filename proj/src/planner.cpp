#include "mapdd/planner.hpp"

#include <algorithm>

namespace mapdd {

namespace {

// Max-heap comparator: returns true when a has lower priority than b.
struct Worse {
  template <class N>
  bool operator()(const N& a, const N& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    return a.v > b.v;
  }
};

}  // namespace

Planner::Planner(const GridMap& map, const DistanceTable& dist, PlannerOptions options)
    : map_(&map),
      dist_(&dist),
      options_(options),
      leg_budget_(options.leg_budget > 0 ? options.leg_budget : 4 * (map.width() + map.height())),
      num_cells_(map.num_cells()) {}

void Planner::reset_scratch(std::size_t layers) {
  const std::size_t need = layers * static_cast<std::size_t>(num_cells_);
  if (stamp_.size() < need) {
    stamp_.assign(need, 0);
    parent_.resize(need);
    generation_ = 0;
  }
  if (++generation_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    generation_ = 1;
  }
  heap_.clear();
}

bool Planner::search_leg(AgentId self, VertexIndex origin, Timestep start, VertexIndex goal, bool rest_at_goal,
                         const Token& token, std::vector<VertexIndex>& out) {
  Timestep free_after = -1;
  Timestep horizon = start + leg_budget_;
  if (rest_at_goal) {
    const AgentId r = token.rester(goal);
    if (r != kNoAgent && r != self) return false;
    free_after = token.last_transit(goal, self);
    horizon += std::max<Timestep>(0, free_after - start);
  }
  const std::int32_t max_g = static_cast<std::int32_t>(horizon - start);
  reset_scratch(static_cast<std::size_t>(max_g) + 1);

  const DistanceTable& h = *dist_;
  auto push = [&](std::int32_t g, VertexIndex v, VertexIndex parent) {
    const std::size_t s = slot(g, v);
    if (stamp_[s] == generation_) return;
    stamp_[s] = generation_;
    parent_[s] = parent;
    heap_.push_back({g + h(v, goal), g, v});
    std::push_heap(heap_.begin(), heap_.end(), Worse{});
  };

  push(0, origin, -1);
  VertexIndex nb[4];
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), Worse{});
    const Node n = heap_.back();
    heap_.pop_back();
    ++expansions_;
    const Timestep t = start + n.g;
    if (n.v == goal && t > free_after) {
      out.resize(static_cast<std::size_t>(n.g) + 1);
      VertexIndex v = n.v;
      for (std::int32_t g = n.g; g >= 0; --g) {
        out[g] = v;
        v = parent_[slot(g, v)];
      }
      return true;
    }
    if (n.g >= max_g) continue;
    const std::int32_t g1 = n.g + 1;
    if (token.move_free(n.v, n.v, t, self)) push(g1, n.v, n.v);
    for (int k = 0, c = map_->neighbors(n.v, nb); k < c; ++k) {
      const VertexIndex u = nb[k];
      if (g1 + h(u, goal) > max_g) continue;
      if (token.move_free(n.v, u, t, self)) push(g1, u, n.v);
    }
  }
  return false;
}

std::optional<PlannedPath> Planner::plan_path(const PlanRequest& req, const Token& token) {
  if (req.waypoints.empty()) return std::nullopt;
  PlannedPath result;
  result.path.start_time = req.start_time;
  result.path.vertices.push_back(req.origin);
  std::vector<VertexIndex> leg;
  VertexIndex at = map_->index(req.origin);
  Timestep t = req.start_time;
  for (std::size_t w = 0; w < req.waypoints.size(); ++w) {
    const VertexIndex goal = map_->index(req.waypoints[w]);
    const bool last = w + 1 == req.waypoints.size();
    if (!search_leg(req.agent, at, t, goal, last, token, leg)) return std::nullopt;
    for (std::size_t k = 1; k < leg.size(); ++k) result.path.vertices.push_back(map_->vertex(leg[k]));
    t += static_cast<Timestep>(leg.size()) - 1;
    at = goal;
    result.arrivals.push_back(t);
  }
  return result;
}

std::optional<SpaceTimePath> Planner::plan_reverse(const ReversePlanRequest& req, const Token& token) {
  if (req.end_time < req.earliest_time) return std::nullopt;
  const VertexIndex origin = map_->index(req.origin);
  const VertexIndex goal = map_->index(req.target);
  if (token.occupant(origin, req.end_time) != kNoAgent) return std::nullopt;

  const std::int32_t max_g =
      static_cast<std::int32_t>(std::min<Timestep>(req.end_time - req.earliest_time, leg_budget_));
  // An agent parked on the target blocks it from `since` on, so the target
  // is only accepted at g >= min_g. max(h, min_g - g) stays consistent.
  std::int32_t min_g = 0;
  if (token.rester(goal) != kNoAgent) {
    const Timestep need = req.end_time - token.rest_since(goal) + 1;
    if (need > max_g) return std::nullopt;
    min_g = static_cast<std::int32_t>(std::max<Timestep>(0, need));
  }
  reset_scratch(static_cast<std::size_t>(max_g) + 1);

  const DistanceTable& h = *dist_;
  auto push = [&](std::int32_t g, VertexIndex v, VertexIndex parent) {
    const std::size_t s = slot(g, v);
    if (stamp_[s] == generation_) return;
    stamp_[s] = generation_;
    parent_[s] = parent;
    heap_.push_back({std::max(g + h(v, goal), min_g), g, v});
    std::push_heap(heap_.begin(), heap_.end(), Worse{});
  };

  push(0, origin, -1);
  VertexIndex nb[4];
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), Worse{});
    const Node n = heap_.back();
    heap_.pop_back();
    ++expansions_;
    const Timestep t = req.end_time - n.g;
    if (n.v == goal) {
      // Parents point towards the delivery end, i.e. forward in time.
      SpaceTimePath p{t, {}};
      p.vertices.reserve(static_cast<std::size_t>(n.g) + 1);
      VertexIndex v = n.v;
      for (std::int32_t g = n.g; g >= 0; --g) {
        p.vertices.push_back(map_->vertex(v));
        v = parent_[slot(g, v)];
      }
      return p;
    }
    if (n.g >= max_g) continue;
    const std::int32_t g1 = n.g + 1;
    // Predecessor u at t-1 must be free and the move u -> n.v must not swap
    // with a real agent.
    auto try_pred = [&](VertexIndex u) {
      if (g1 + h(u, goal) > max_g) return;
      if (token.occupant(u, t - 1) != kNoAgent) return;
      if (!token.move_free(u, n.v, t - 1, kNoAgent)) return;
      push(g1, u, n.v);
    };
    try_pred(n.v);
    for (int k = 0, c = map_->neighbors(n.v, nb); k < c; ++k) try_pred(nb[k]);
  }
  return std::nullopt;
}

std::optional<SpaceTimePath> Planner::plan_relocation(AgentId agent, const Token& token,
                                                      const std::vector<char>& forbidden) {
  const Vertex here = token.location(agent);
  const VertexIndex from = map_->index(here);
  std::vector<std::pair<int, VertexIndex>> candidates;
  for (Vertex e : map_->endpoints()) {
    const VertexIndex v = map_->index(e);
    if (v == from || forbidden[v]) continue;
    const AgentId r = token.rester(v);
    if (r != kNoAgent && r != agent) continue;
    candidates.emplace_back((*dist_)(from, v), v);
  }
  std::sort(candidates.begin(), candidates.end());
  const std::size_t tries = std::min(candidates.size(), static_cast<std::size_t>(std::max(0, options_.relocation_attempts)));
  for (std::size_t k = 0; k < tries; ++k) {
    PlanRequest req{agent, here, {map_->vertex(candidates[k].second)}, token.now()};
    if (auto planned = plan_path(req, token)) return std::move(planned->path);
  }
  return std::nullopt;
}

}  // namespace mapdd
