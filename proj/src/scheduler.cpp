#include "mapdd/scheduler.hpp"

#include <algorithm>
#include <array>

#include "mapdd/error.hpp"

namespace mapdd {

namespace {
constexpr std::array<std::string_view, 4> kAlgorithmNames = {"tp", "dtp", "tpts", "dtpts"};
}

std::string_view to_string(Algorithm a) { return kAlgorithmNames[static_cast<std::size_t>(a)]; }

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (std::size_t k = 0; k < kAlgorithmNames.size(); ++k)
    if (kAlgorithmNames[k] == name) return static_cast<Algorithm>(k);
  return std::nullopt;
}

SchedulerConfig SchedulerConfig::make(Algorithm algorithm, double alpha, bool swap, bool switching) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in [0, 1]");
  const std::string name(to_string(algorithm));
  switch (algorithm) {
    case Algorithm::tp:
      if (alpha != 0.0) throw InputError("tp fixes alpha = 0; use dtp for alpha > 0");
      [[fallthrough]];
    case Algorithm::dtp:
      if (swap || switching) throw InputError(name + " does not support swapping or switching; use dtpts");
      return {algorithm, alpha, false, false};
    case Algorithm::tpts:
      if (alpha != 0.0) throw InputError("tpts fixes alpha = 0; use dtpts for alpha > 0");
      if (switching) throw InputError("tpts does not switch tasks; use dtpts --switch");
      return {algorithm, 0.0, true, false};
    case Algorithm::dtpts:
      return {algorithm, alpha, swap, switching};
  }
  throw InputError("unknown algorithm");
}

AssignmentScore score_task(const Task& task, int cost, Timestep now, double alpha) {
  AssignmentScore s;
  s.task = task.id;
  s.margin = task.pickup_deadline.value_or(task.delivery_deadline) - now;
  s.cost = cost;
  s.score = alpha * static_cast<double>(s.margin) + (1.0 - alpha) * static_cast<double>(cost);
  return s;
}

TaskId select_best(std::span<const AssignmentScore> scores) {
  const AssignmentScore* best = nullptr;
  for (const AssignmentScore& s : scores) {
    if (best == nullptr || s.score < best->score || (s.score == best->score && s.task < best->task)) best = &s;
  }
  return best != nullptr ? best->task : kNoTask;
}

bool should_switch(Timestep new_pickup_deadline, int new_cost, Timestep cur_pickup_deadline, int cur_cost) {
  return new_pickup_deadline < cur_pickup_deadline && new_cost < cur_cost;
}

World::World(const GridMap& m, const DistanceTable& d, const std::vector<Vertex>& starts, std::vector<Task> tasks)
    : map(&m), dist(&d), token(m, starts), status(tasks.size(), TaskStatus::unreleased) {
  agents.resize(starts.size());
  for (AgentId a = 0; a < static_cast<AgentId>(starts.size()); ++a) agents[a].id = a;
  for (Task& t : tasks) token.add_task(t);
}

Scheduler::Scheduler(World& world, SchedulerConfig cfg, PlannerOptions planner_options)
    : w_(&world), cfg_(cfg), planner_(*world.map, *world.dist, planner_options) {}

bool Scheduler::in_task_set(TaskId j) const {
  if (w_->status[j] != TaskStatus::open) return false;
  if (w_->token.agent_of(j) == kNoAgent) return true;
  // Assigned tasks stay in the set until pickup only for the swapping
  // family; with both extensions off it behaves exactly like TP.
  return cfg_.swap_family() && (cfg_.enable_swap || cfg_.enable_switch);
}

void Scheduler::step(std::span<const TaskId> released) {
  update_pickup_deadlines(released);
  apply_switches(released);
  serve_requests();
}

void Scheduler::update_pickup_deadlines(std::span<const TaskId> tasks) {
  Token& token = w_->token;
  for (TaskId j : tasks) {
    Task& task = token.tasks()[j];
    const Timestep free = w_->h(task.delivery, task.pickup);
    auto dummy = planner_.plan_reverse({task.delivery, task.pickup, task.delivery_deadline, token.now()}, token);
    const Timestep len = dummy ? dummy->length() : -1;
    task.pickup_deadline = task.delivery_deadline - (dummy ? len : free);
    token.set_dummy_path(j, std::move(dummy));
    ++counters_.deadline_updates;

    TraceEvent e;
    e.time = token.now();
    e.kind = EventKind::deadline_update;
    e.task = j;
    e.delivery_deadline = task.delivery_deadline;
    e.pickup_deadline = *task.pickup_deadline;
    e.dummy_length = len;
    e.free_distance = free;
    w_->emit(e);
  }
}

std::vector<TaskId> Scheduler::candidate_tasks(AgentId a) const {
  const Token& token = w_->token;
  const GridMap& map = *w_->map;
  std::vector<TaskId> out;
  for (TaskId j = 0; j < static_cast<TaskId>(token.tasks().size()); ++j) {
    if (!in_task_set(j)) continue;
    const AgentId incumbent = token.agent_of(j);
    if (incumbent == a) continue;
    if (incumbent != kNoAgent && !(cfg_.swap_family() && cfg_.enable_swap)) continue;
    const Task& task = token.tasks()[j];
    auto blocked = [&](Vertex v) {
      const AgentId r = token.rester(map.index(v));
      return r != kNoAgent && r != a && r != incumbent;
    };
    if (blocked(task.pickup) || blocked(task.delivery)) continue;
    out.push_back(j);
  }
  return out;
}

std::vector<AssignmentScore> Scheduler::score_candidates(AgentId a, std::span<const TaskId> candidates) const {
  const Token& token = w_->token;
  const Vertex here = token.location(a);
  std::vector<AssignmentScore> scores;
  scores.reserve(candidates.size());
  for (TaskId j : candidates) {
    const Task& task = token.tasks()[j];
    scores.push_back(score_task(task, w_->h(here, task.pickup), token.now(), cfg_.alpha));
  }
  return scores;
}

bool Scheduler::task_switch_check(AgentId a, TaskId new_task) const {
  const Token& token = w_->token;
  const TaskId cur = token.task_of(a);
  if (cur == kNoTask || w_->agents[a].phase != Phase::to_pickup) return false;
  const Task& tn = token.tasks()[new_task];
  const Task& tc = token.tasks()[cur];
  const Vertex here = token.location(a);
  return should_switch(tn.pickup_deadline.value_or(tn.delivery_deadline), w_->h(here, tn.pickup),
                       tc.pickup_deadline.value_or(tc.delivery_deadline), w_->h(here, tc.pickup));
}

void Scheduler::apply_switches(std::span<const TaskId> released) {
  if (!cfg_.enable_switch) return;
  Token& token = w_->token;
  for (TaskId j : released) {
    for (AgentId a = 0; a < static_cast<AgentId>(token.num_agents()); ++a) {
      AgentState& st = w_->agents[a];
      if (st.phase != Phase::to_pickup || st.pickup_time <= token.now()) continue;
      if (!task_switch_check(a, j)) continue;
      // Dropping the path leaves the agent resting where it stands; that is
      // only sound if nobody else is routed through that cell later.
      if (!token.can_rest(token.map().index(token.location(a)), token.now(), a)) continue;
      const TaskId cur = st.assigned_task;
      token.unassign(a);
      token.clear_path(a);
      st.phase = Phase::idle;
      st.assigned_task = kNoTask;
      ++counters_.switches;
      TraceEvent e;
      e.time = token.now();
      e.kind = EventKind::switch_task;
      e.agent = a;
      e.task = cur;
      e.other_task = j;
      w_->emit(e);
    }
  }
}

void Scheduler::serve_requests() {
  Token& token = w_->token;
  const auto m = static_cast<AgentId>(token.num_agents());
  std::vector<char> served(static_cast<std::size_t>(m), 0);
  served_ = &served;
  // Each steal strictly advances some pickup arrival, so re-requests are
  // finite; the guard only protects against bugs.
  const std::size_t guard = 64 * static_cast<std::size_t>(m) + 64;
  for (std::size_t iter = 0; iter < guard; ++iter) {
    AgentId next = kNoAgent;
    for (AgentId a = 0; a < m; ++a) {
      if (!served[a] && w_->agents[a].phase == Phase::idle && token.path_finished(a)) {
        next = a;
        break;
      }
    }
    if (next == kNoAgent) break;
    served[next] = 1;
    written_.clear();
    if (cfg_.swap_family())
      serve_dtpts(next);
    else
      serve_dtp(next);
    refresh_overwritten();
  }
  served_ = nullptr;
}

void Scheduler::serve_dtp(AgentId a) {
  const auto candidates = candidate_tasks(a);
  if (candidates.empty()) {
    resolve_deadlock_or_stay(a);
    return;
  }
  const auto scores = score_candidates(a, candidates);
  if (!try_assign(a, select_best(scores))) resolve_deadlock_or_stay(a);
}

void Scheduler::serve_dtpts(AgentId a) {
  const auto candidates = candidate_tasks(a);
  auto scores = score_candidates(a, candidates);
  std::sort(scores.begin(), scores.end(), [](const AssignmentScore& x, const AssignmentScore& y) {
    return x.score != y.score ? x.score < y.score : x.task < y.task;
  });
  bool assigned = false;
  for (const AssignmentScore& s : scores) {
    if (w_->token.agent_of(s.task) == kNoAgent) {
      // Same as D-TP: the best unassigned task is tried once.
      assigned = try_assign(a, s.task);
      break;
    }
    if (try_steal(a, s.task)) {
      assigned = true;
      break;
    }
  }
  if (!assigned) resolve_deadlock_or_stay(a);
}

bool Scheduler::try_assign(AgentId a, TaskId j) {
  const Token& token = w_->token;
  const Task& task = token.tasks()[j];
  auto planned = planner_.plan_path({a, token.location(a), {task.pickup, task.delivery}, token.now()}, token);
  if (!planned) {
    ++counters_.plan_failures;
    return false;
  }
  TraceEvent e;
  e.time = token.now();
  e.kind = EventKind::assign;
  e.agent = a;
  e.task = j;
  w_->emit(e);
  commit_assignment(a, j, std::move(*planned));
  return true;
}

bool Scheduler::try_steal(AgentId a, TaskId j) {
  Token& token = w_->token;
  const AgentId victim = token.agent_of(j);
  AgentState& vs = w_->agents[victim];
  if (vs.phase != Phase::to_pickup || vs.pickup_time <= token.now()) return false;
  if (!token.can_rest(token.map().index(token.location(victim)), token.now(), victim)) return false;

  const Task& task = token.tasks()[j];
  // The stealer cannot beat its free-space distance; skip hopeless plans.
  if (token.now() + w_->h(token.location(a), task.pickup) >= vs.pickup_time) return false;
  SpaceTimePath saved = token.path(victim);
  token.clear_path(victim);
  auto planned = planner_.plan_path({a, token.location(a), {task.pickup, task.delivery}, token.now()}, token);
  // Ties keep the incumbent.
  if (!planned || planned->arrivals.front() >= vs.pickup_time) {
    token.set_path(victim, std::move(saved));
    return false;
  }
  token.unassign(victim);
  vs.phase = Phase::idle;
  vs.assigned_task = kNoTask;
  if (served_ != nullptr) (*served_)[victim] = 0;
  ++counters_.steals;

  TraceEvent e;
  e.time = token.now();
  e.kind = EventKind::steal;
  e.agent = a;
  e.task = j;
  e.other_agent = victim;
  w_->emit(e);
  commit_assignment(a, j, std::move(*planned));
  return true;
}

void Scheduler::commit_assignment(AgentId a, TaskId j, PlannedPath planned) {
  Token& token = w_->token;
  token.assign(a, j);
  token.set_path(a, std::move(planned.path));
  AgentState& st = w_->agents[a];
  st.phase = Phase::to_pickup;
  st.assigned_task = j;
  st.pickup_time = planned.arrivals.front();
  written_.push_back(a);
  ++counters_.assignments;
  if (st.pickup_time == token.now()) {
    st.phase = Phase::to_delivery;
    w_->status[j] = TaskStatus::executing;
    TraceEvent e;
    e.time = token.now();
    e.kind = EventKind::pickup;
    e.agent = a;
    e.task = j;
    w_->emit(e);
  }
}

void Scheduler::resolve_deadlock_or_stay(AgentId a) {
  Token& token = w_->token;
  const GridMap& map = *w_->map;
  const Vertex here = token.location(a);
  bool blocking = !map.is_endpoint(here);
  std::vector<char> forbidden(static_cast<std::size_t>(map.num_cells()), 0);
  for (TaskId j = 0; j < static_cast<TaskId>(token.tasks().size()); ++j) {
    if (!in_task_set(j)) continue;
    const Task& task = token.tasks()[j];
    forbidden[map.index(task.pickup)] = 1;
    forbidden[map.index(task.delivery)] = 1;
    if (task.delivery == here) blocking = true;
  }
  TraceEvent e;
  e.time = token.now();
  e.agent = a;
  if (blocking) {
    if (auto path = planner_.plan_relocation(a, token, forbidden)) {
      e.kind = EventKind::relocate;
      e.to = path->back();
      token.set_path(a, std::move(*path));
      w_->agents[a].phase = Phase::relocating;
      written_.push_back(a);
      ++counters_.relocations;
      w_->emit(e);
      return;
    }
  }
  e.kind = EventKind::stay;
  w_->emit(e);
}

void Scheduler::refresh_overwritten() {
  if (written_.empty()) return;
  const Token& token = w_->token;
  std::vector<TaskId> hit;
  for (TaskId j = 0; j < static_cast<TaskId>(token.tasks().size()); ++j) {
    if (!in_task_set(j)) continue;
    const auto& dummy = token.dummy_path(j);
    if (!dummy) continue;
    for (AgentId a : written_) {
      if (overwrites(token.path(a), *dummy)) {
        hit.push_back(j);
        break;
      }
    }
  }
  update_pickup_deadlines(hit);
}

}  // namespace mapdd
