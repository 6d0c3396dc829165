#include "mapdd/simulator.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace mapdd {

Timestep default_step_cap(const Instance& inst, const DistanceTable& dist) {
  Timestep lo = 0;
  Timestep hi = 0;
  if (!inst.tasks.empty()) {
    auto [mn, mx] = std::minmax_element(inst.tasks.begin(), inst.tasks.end(), [](const Task& a, const Task& b) {
      return a.release_time < b.release_time;
    });
    lo = mn->release_time;
    hi = mx->release_time;
  }
  return 10 * ((hi - lo) + static_cast<Timestep>(inst.tasks.size()) * std::max(1, dist.diameter()));
}

RunOutput run(const Instance& inst, const SchedulerConfig& cfg, std::uint64_t seed, const RunOptions& options) {
  DistanceTable dist(*inst.map);
  return run(inst, cfg, seed, options, dist);
}

RunOutput run(const Instance& inst, const SchedulerConfig& cfg, std::uint64_t /*seed*/, const RunOptions& options,
              const DistanceTable& dist) {
  const auto wall_start = std::chrono::steady_clock::now();
  RunOutput out;
  RunResult& res = out.result;

  World world(*inst.map, dist, inst.agent_starts, inst.tasks);
  if (options.record_trace) world.trace = &out.trace;
  Scheduler scheduler(world, cfg, options.planner);
  Token& token = world.token;

  const auto n = static_cast<TaskId>(inst.tasks.size());
  std::vector<TaskId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](TaskId a, TaskId b) {
    return inst.tasks[a].release_time < inst.tasks[b].release_time;
  });

  const Timestep cap = options.step_cap > 0 ? options.step_cap : default_step_cap(inst, dist);
  std::size_t next_release = 0;
  std::vector<TaskId> released;
  int delivered = 0;

  auto all_idle = [&] {
    for (const AgentState& st : world.agents)
      if (st.phase != Phase::idle) return false;
    return true;
  };

  for (;;) {
    const Timestep t = token.now();
    if (delivered == n && next_release == order.size() && all_idle()) break;
    if (t >= cap) {
      res.liveness_failure = true;
      break;
    }

    released.clear();
    while (next_release < order.size() && inst.tasks[order[next_release]].release_time <= t) {
      const TaskId j = order[next_release++];
      world.status[j] = TaskStatus::open;
      released.push_back(j);
      TraceEvent e;
      e.time = t;
      e.kind = EventKind::release;
      e.task = j;
      world.emit(e);
    }
    std::sort(released.begin(), released.end());

    scheduler.step(released);
    if (options.check_token) {
      if (auto v = token.find_violation()) throw std::logic_error("token invariant broken at t=" + std::to_string(t) + ": " + *v);
    }

    if (world.trace != nullptr) {
      for (AgentId a = 0; a < static_cast<AgentId>(token.num_agents()); ++a) {
        TraceEvent e;
        e.time = t + 1;
        e.kind = EventKind::move;
        e.agent = a;
        e.from = token.occupancy(a, t);
        e.to = token.occupancy(a, t + 1);
        world.emit(e);
      }
    }
    token.advance();
    const Timestep now = token.now();

    for (AgentId a = 0; a < static_cast<AgentId>(token.num_agents()); ++a) {
      AgentState& st = world.agents[a];
      if (st.phase == Phase::to_pickup && st.pickup_time == now) {
        st.phase = Phase::to_delivery;
        world.status[st.assigned_task] = TaskStatus::executing;
        TraceEvent e;
        e.time = now;
        e.kind = EventKind::pickup;
        e.agent = a;
        e.task = st.assigned_task;
        world.emit(e);
      }
      if (st.phase == Phase::to_delivery && token.path(a).end_time() == now) {
        const TaskId j = st.assigned_task;
        Task& task = token.tasks()[j];
        task.completion_time = now;
        world.status[j] = TaskStatus::delivered;
        token.unassign(a);
        st.phase = Phase::idle;
        st.assigned_task = kNoTask;
        ++delivered;
        res.makespan = std::max(res.makespan, now);
        TraceEvent e;
        e.time = now;
        e.kind = EventKind::deliver;
        e.agent = a;
        e.task = j;
        e.tardiness = tardiness(task).tardiness;
        world.emit(e);
      } else if (st.phase == Phase::relocating && token.path_finished(a)) {
        st.phase = Phase::idle;
      }
    }
  }

  res.steps = token.now();
  res.completed = delivered;
  for (const Task& task : token.tasks()) {
    if (!task.completion_time) continue;
    const TardinessRecord rec = tardiness(task);
    res.per_task.push_back(rec);
    res.cumulative_tardiness += rec.tardiness;
    if (rec.failed()) ++res.failure_count;
  }
  res.counters = scheduler.counters();
  res.wall_time = std::chrono::steady_clock::now() - wall_start;
  return out;
}

namespace {

std::string at_time(Timestep t) { return "t=" + std::to_string(t) + ": "; }

std::string cell(Vertex v) { return "(" + std::to_string(v.x) + "," + std::to_string(v.y) + ")"; }

}  // namespace

ValidationReport validate_trace(const Trace& trace, const Instance& inst) {
  ValidationReport rep;
  auto fail = [&rep](std::string msg) {
    if (rep.violations.size() < 1000) rep.violations.push_back(std::move(msg));
  };
  const GridMap& map = *inst.map;
  const auto m = static_cast<int>(inst.agent_starts.size());
  const auto n = static_cast<int>(inst.tasks.size());

  std::vector<Vertex> pos = inst.agent_starts;
  Timestep clock = 0;
  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  std::vector<int> carrier(static_cast<std::size_t>(n), -1);
  std::vector<char> released(static_cast<std::size_t>(n), 0);
  std::vector<char> done(static_cast<std::size_t>(n), 0);
  std::vector<int> holding(static_cast<std::size_t>(m), -1);

  {
    std::map<Vertex, int> at;
    for (int a = 0; a < m; ++a)
      if (!at.emplace(pos[a], a).second) fail(at_time(0) + "agents share start " + cell(pos[a]));
  }

  std::vector<const TraceEvent*> batch;
  auto flush = [&]() {
    if (batch.empty()) return;
    const Timestep t = batch.front()->time;
    if (t != clock + 1) fail(at_time(t) + "motion does not follow t=" + std::to_string(clock));
    std::vector<Vertex> next = pos;
    std::vector<int> seen(static_cast<std::size_t>(m), 0);
    for (const TraceEvent* e : batch) {
      if (e->agent < 0 || e->agent >= m) {
        fail(at_time(t) + "move of unknown agent " + std::to_string(e->agent));
        continue;
      }
      if (seen[e->agent]++) fail(at_time(t) + "agent " + std::to_string(e->agent) + " moves twice");
      if (e->from != pos[e->agent])
        fail(at_time(t) + "agent " + std::to_string(e->agent) + " moves from " + cell(e->from) + " but is at " +
             cell(pos[e->agent]));
      const int manhattan = std::abs(e->to.x - e->from.x) + std::abs(e->to.y - e->from.y);
      if (manhattan > 1)
        fail(at_time(t) + "agent " + std::to_string(e->agent) + " jumps " + cell(e->from) + " -> " + cell(e->to));
      if (!map.in_bounds(e->to) || map.kind(e->to) == CellKind::obstacle)
        fail(at_time(t) + "agent " + std::to_string(e->agent) + " enters blocked cell " + cell(e->to));
      next[e->agent] = e->to;
    }
    for (int a = 0; a < m; ++a)
      if (seen[a] == 0) fail(at_time(t) + "agent " + std::to_string(a) + " has no move record");

    std::map<Vertex, int> occupied;
    for (int a = 0; a < m; ++a) {
      auto [it, fresh] = occupied.emplace(next[a], a);
      if (!fresh)
        fail(at_time(t) + "vertex conflict between agents " + std::to_string(it->second) + " and " +
             std::to_string(a) + " at " + cell(next[a]));
    }
    std::map<Vertex, int> before;
    for (int a = 0; a < m; ++a) before.emplace(pos[a], a);
    for (int a = 0; a < m; ++a) {
      if (next[a] == pos[a]) continue;
      auto it = before.find(next[a]);
      if (it == before.end() || it->second == a) continue;
      const int b = it->second;
      if (a < b && next[b] == pos[a])
        fail(at_time(t - 1) + "swap conflict between agents " + std::to_string(a) + " and " + std::to_string(b));
    }
    pos = std::move(next);
    clock = t;
    batch.clear();
  };

  auto task_ok = [&](const TraceEvent& e) {
    if (e.task < 0 || e.task >= n) {
      fail(at_time(e.time) + std::string(to_string(e.kind)) + " of unknown task " + std::to_string(e.task));
      return false;
    }
    return true;
  };
  auto agent_ok = [&](AgentId a, const TraceEvent& e) {
    if (a < 0 || a >= m) {
      fail(at_time(e.time) + std::string(to_string(e.kind)) + " names unknown agent " + std::to_string(a));
      return false;
    }
    return true;
  };

  Timestep last_time = 0;
  for (const TraceEvent& e : trace) {
    if (e.time < last_time) fail(at_time(e.time) + "event out of time order");
    last_time = std::max(last_time, e.time);
    if (e.kind == EventKind::move) {
      if (!batch.empty() && batch.front()->time != e.time) flush();
      batch.push_back(&e);
      continue;
    }
    flush();
    if (e.time != clock && e.kind != EventKind::release)
      fail(at_time(e.time) + std::string(to_string(e.kind)) + " recorded while agents are at t=" + std::to_string(clock));

    switch (e.kind) {
      case EventKind::release:
        if (!task_ok(e)) break;
        if (released[e.task]) fail(at_time(e.time) + "task " + std::to_string(e.task) + " released twice");
        if (inst.tasks[e.task].release_time != e.time)
          fail(at_time(e.time) + "task " + std::to_string(e.task) + " released off schedule");
        released[e.task] = 1;
        break;
      case EventKind::deadline_update: {
        if (!task_ok(e)) break;
        const Task& task = inst.tasks[e.task];
        if (e.delivery_deadline != task.delivery_deadline)
          fail(at_time(e.time) + "task " + std::to_string(e.task) + " delivery deadline mismatch");
        const Timestep expect =
            e.dummy_length >= 0 ? e.delivery_deadline - e.dummy_length : e.delivery_deadline - e.free_distance;
        if (e.pickup_deadline != expect)
          fail(at_time(e.time) + "task " + std::to_string(e.task) + " pickup deadline " +
               std::to_string(e.pickup_deadline) + " != " + std::to_string(expect));
        if (e.dummy_length >= 0 && e.dummy_length < e.free_distance)
          fail(at_time(e.time) + "task " + std::to_string(e.task) + " dummy path shorter than the free distance");
        break;
      }
      case EventKind::assign:
        if (!task_ok(e) || !agent_ok(e.agent, e)) break;
        if (!released[e.task]) fail(at_time(e.time) + "task " + std::to_string(e.task) + " assigned before release");
        if (owner[e.task] != -1) fail(at_time(e.time) + "task " + std::to_string(e.task) + " assigned twice");
        if (holding[e.agent] != -1) fail(at_time(e.time) + "agent " + std::to_string(e.agent) + " holds two tasks");
        owner[e.task] = e.agent;
        holding[e.agent] = e.task;
        break;
      case EventKind::steal:
        if (!task_ok(e) || !agent_ok(e.agent, e) || !agent_ok(e.other_agent, e)) break;
        if (owner[e.task] != e.other_agent || carrier[e.task] != -1)
          fail(at_time(e.time) + "task " + std::to_string(e.task) + " stolen from a non-owner or after pickup");
        if (holding[e.agent] != -1) fail(at_time(e.time) + "agent " + std::to_string(e.agent) + " holds two tasks");
        holding[e.other_agent] = -1;
        owner[e.task] = e.agent;
        holding[e.agent] = e.task;
        break;
      case EventKind::switch_task:
      case EventKind::unassign:
        if (!task_ok(e) || !agent_ok(e.agent, e)) break;
        if (owner[e.task] != e.agent || carrier[e.task] != -1)
          fail(at_time(e.time) + "task " + std::to_string(e.task) + " dropped by a non-owner or after pickup");
        owner[e.task] = -1;
        holding[e.agent] = -1;
        break;
      case EventKind::pickup:
        if (!task_ok(e) || !agent_ok(e.agent, e)) break;
        if (owner[e.task] != e.agent) fail(at_time(e.time) + "task " + std::to_string(e.task) + " picked up by non-owner");
        if (carrier[e.task] != -1) fail(at_time(e.time) + "task " + std::to_string(e.task) + " picked up twice");
        if (pos[e.agent] != inst.tasks[e.task].pickup)
          fail(at_time(e.time) + "task " + std::to_string(e.task) + " picked up away from its pickup vertex");
        carrier[e.task] = e.agent;
        break;
      case EventKind::deliver: {
        if (!task_ok(e) || !agent_ok(e.agent, e)) break;
        if (carrier[e.task] != e.agent)
          fail(at_time(e.time) + "task " + std::to_string(e.task) + " delivered without a prior pickup by agent " +
               std::to_string(e.agent));
        if (done[e.task]) fail(at_time(e.time) + "task " + std::to_string(e.task) + " delivered twice");
        if (pos[e.agent] != inst.tasks[e.task].delivery)
          fail(at_time(e.time) + "task " + std::to_string(e.task) + " delivered away from its delivery vertex");
        done[e.task] = 1;
        owner[e.task] = -1;
        holding[e.agent] = -1;
        const Timestep eps = std::max<Timestep>(0, e.time - inst.tasks[e.task].delivery_deadline);
        if (eps != e.tardiness) fail(at_time(e.time) + "task " + std::to_string(e.task) + " tardiness mismatch");
        rep.cumulative_tardiness += eps;
        if (eps > 0) ++rep.failure_count;
        rep.makespan = std::max(rep.makespan, e.time);
        ++rep.delivered;
        break;
      }
      case EventKind::relocate:
      case EventKind::stay:
        agent_ok(e.agent, e);
        break;
      case EventKind::move:
        break;
    }
  }
  flush();
  for (int j = 0; j < n; ++j)
    if (!done[j]) fail("task " + std::to_string(j) + " was never delivered");
  return rep;
}

}  // namespace mapdd
