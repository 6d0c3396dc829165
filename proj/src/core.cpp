#include "mapdd/core.hpp"

#include <algorithm>
#include <stdexcept>

namespace mapdd {

TardinessRecord tardiness(const Task& task) {
  if (!task.completion_time) throw std::logic_error("tardiness of uncompleted task " + std::to_string(task.id));
  return {task.id, std::max<Timestep>(0, *task.completion_time - task.delivery_deadline)};
}

Vertex SpaceTimePath::at(Timestep t) const {
  if (t < start_time) throw std::logic_error("path queried before its start time");
  const Timestep k = t - start_time;
  return k < static_cast<Timestep>(vertices.size()) ? vertices[k] : vertices.back();
}

bool SpaceTimePath::is_contiguous() const {
  for (std::size_t k = 1; k < vertices.size(); ++k)
    if (!adjacent_or_same(vertices[k - 1], vertices[k])) return false;
  return true;
}

SpaceTimePath trivial_path(Vertex v, Timestep t) { return {t, {v}}; }

std::optional<Conflict> detect_conflict(const SpaceTimePath& a, const SpaceTimePath& b) {
  const Timestep from = std::max(a.start_time, b.start_time);
  // Past both ends nothing moves, so one extra step covers the rest case.
  const Timestep to = std::max(a.end_time(), b.end_time());
  for (Timestep t = from; t <= to; ++t) {
    const Vertex pa = a.at(t);
    const Vertex pb = b.at(t);
    if (pa == pb) return Conflict{ConflictKind::vertex, t, pa};
    if (t < to) {
      const Vertex na = a.at(t + 1);
      const Vertex nb = b.at(t + 1);
      if (pa == nb && pb == na) return Conflict{ConflictKind::swap, t, pa};
    }
  }
  return std::nullopt;
}

bool overwrites(const SpaceTimePath& real, const SpaceTimePath& dummy) {
  const Timestep from = std::max(real.start_time, dummy.start_time);
  const Timestep to = dummy.end_time();
  for (Timestep t = from; t <= to; ++t) {
    const Vertex pr = real.at(t);
    const Vertex pd = dummy.at(t);
    if (pr == pd) return true;
    if (t < to && pr == dummy.at(t + 1) && pd == real.at(t + 1)) return true;
  }
  return false;
}

Token::Token(const GridMap& map, const std::vector<Vertex>& starts, Timestep now)
    : map_(&map), now_(now), rest_(map.num_cells()), agent_task_(starts.size(), kNoTask) {
  paths_.reserve(starts.size());
  for (AgentId a = 0; a < static_cast<AgentId>(starts.size()); ++a) {
    paths_.push_back(trivial_path(starts[a], now));
    reserve(a, paths_.back());
  }
}

Vertex Token::occupancy(AgentId a, Timestep t) const { return paths_[a].at(t); }

std::int16_t* Token::row(Timestep t) {
  const Timestep k = t - now_;
  return k >= 0 && k < static_cast<Timestep>(rows_.size()) ? rows_[k].data() : nullptr;
}

const std::int16_t* Token::row(Timestep t) const {
  const Timestep k = t - now_;
  return k >= 0 && k < static_cast<Timestep>(rows_.size()) ? rows_[k].data() : nullptr;
}

void Token::ensure_rows(Timestep last) {
  while (now_ + static_cast<Timestep>(rows_.size()) <= last)
    rows_.emplace_back(static_cast<std::size_t>(map_->num_cells()), std::int16_t{-1});
}

void Token::reserve(AgentId a, const SpaceTimePath& p) {
  const Timestep end = p.end_time();
  if (end > now_) ensure_rows(end - 1);
  for (Timestep t = std::max(p.start_time, now_); t < end; ++t) {
    std::int16_t& cell = row(t)[map_->index(p.at(t))];
    if (cell >= 0 && cell != a) throw std::logic_error("reservation overlaps agent " + std::to_string(cell));
    cell = static_cast<std::int16_t>(a);
  }
  Rest& rest = rest_[map_->index(p.back())];
  if (rest.agent != kNoAgent && rest.agent != a) throw std::logic_error("two agents rest on one vertex");
  rest = {a, end};
}

void Token::release(AgentId a, const SpaceTimePath& p) {
  const Timestep end = p.end_time();
  for (Timestep t = std::max(p.start_time, now_); t < end; ++t) {
    std::int16_t* r = row(t);
    if (r == nullptr) break;
    std::int16_t& cell = r[map_->index(p.at(t))];
    if (cell == a) cell = -1;
  }
  Rest& rest = rest_[map_->index(p.back())];
  if (rest.agent == a) rest = {};
}

void Token::set_path(AgentId a, SpaceTimePath path) {
  if (path.start_time > now_ || path.vertices.empty())
    throw std::logic_error("agent path must be non-empty and cover the current timestep");
  release(a, paths_[a]);
  paths_[a] = std::move(path);
  reserve(a, paths_[a]);
}

void Token::clear_path(AgentId a) { set_path(a, trivial_path(location(a), now_)); }

void Token::advance() {
  ++now_;
  if (!rows_.empty()) rows_.pop_front();
}

AgentId Token::occupant(VertexIndex v, Timestep t, AgentId self) const {
  if (const std::int16_t* r = row(t)) {
    const AgentId o = r[v];
    if (o >= 0 && o != self) return o;
  }
  const Rest& rest = rest_[v];
  if (rest.agent != kNoAgent && rest.agent != self && rest.since <= t) return rest.agent;
  return kNoAgent;
}

bool Token::move_free(VertexIndex from, VertexIndex to, Timestep t, AgentId self) const {
  if (occupant(to, t + 1, self) != kNoAgent) return false;
  if (from == to) return true;
  // A swap needs someone moving out of `to` at t into `from` at t+1; a
  // resting agent never moves, so only row entries matter.
  const std::int16_t* r = row(t);
  if (r == nullptr) return true;
  const AgentId o = r[to];
  if (o < 0 || o == self) return true;
  return map_->index(paths_[o].at(t + 1)) != from;
}

Timestep Token::last_transit(VertexIndex v, AgentId self) const {
  for (Timestep k = static_cast<Timestep>(rows_.size()) - 1; k >= 0; --k) {
    const AgentId o = rows_[k][v];
    if (o >= 0 && o != self) return now_ + k;
  }
  return -1;
}

bool Token::can_rest(VertexIndex v, Timestep t, AgentId self) const {
  const Rest& rest = rest_[v];
  if (rest.agent != kNoAgent && rest.agent != self) return false;
  return last_transit(v, self) < t;
}

void Token::add_task(const Task& task) {
  if (task.id != static_cast<TaskId>(tasks_.size())) throw std::logic_error("task ids must be dense");
  tasks_.push_back(task);
  dummy_paths_.emplace_back();
  task_agent_.push_back(kNoAgent);
}

void Token::assign(AgentId a, TaskId j) {
  if (agent_task_[a] != kNoTask || task_agent_[j] != kNoAgent) throw std::logic_error("assignment must stay a partial bijection");
  agent_task_[a] = j;
  task_agent_[j] = a;
}

void Token::unassign(AgentId a) {
  const TaskId j = agent_task_[a];
  if (j == kNoTask) return;
  agent_task_[a] = kNoTask;
  task_agent_[j] = kNoAgent;
}

std::optional<std::string> Token::find_violation() const {
  for (AgentId a = 0; a < static_cast<AgentId>(paths_.size()); ++a) {
    for (AgentId b = a + 1; b < static_cast<AgentId>(paths_.size()); ++b) {
      SpaceTimePath pa = paths_[a];
      SpaceTimePath pb = paths_[b];
      // Only the future matters: trim both to start at now.
      auto trim = [this](SpaceTimePath& p) {
        if (p.start_time < now_) {
          const Timestep drop = std::min<Timestep>(now_ - p.start_time, p.length());
          p.vertices.erase(p.vertices.begin(), p.vertices.begin() + drop);
          p.start_time = now_;
        }
      };
      trim(pa);
      trim(pb);
      if (auto c = detect_conflict(pa, pb)) {
        return std::string(c->kind == ConflictKind::vertex ? "vertex" : "swap") + " conflict between agents " +
               std::to_string(a) + " and " + std::to_string(b) + " at t=" + std::to_string(c->time);
      }
    }
  }
  return std::nullopt;
}

}  // namespace mapdd
