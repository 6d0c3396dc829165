#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mapdd/core.hpp"

namespace mapdd {

enum class EventKind : std::uint8_t {
  release,
  deadline_update,
  assign,
  unassign,
  steal,
  switch_task,
  pickup,
  deliver,
  relocate,
  stay,
  move,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

/// One simulation event. Which fields are meaningful depends on `kind`:
///   deadline_update: task, delivery_deadline, pickup_deadline, dummy_length
///                    (-1 when the reverse search failed), free_distance
///   steal:           agent (new owner), task, other_agent (previous owner)
///   switch_task:     agent, task (abandoned), other_task (the new release)
///   deliver:         agent, task, tardiness
///   relocate:        agent, to (destination)
///   move:            agent, from, to; `time` is the arrival timestep
struct TraceEvent {
  Timestep time = 0;
  EventKind kind = EventKind::stay;
  AgentId agent = kNoAgent;
  TaskId task = kNoTask;
  AgentId other_agent = kNoAgent;
  TaskId other_task = kNoTask;
  Vertex from{};
  Vertex to{};
  Timestep delivery_deadline = 0;
  Timestep pickup_deadline = 0;
  Timestep dummy_length = -1;
  Timestep free_distance = -1;
  Timestep tardiness = 0;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

using Trace = std::vector<TraceEvent>;

/// One JSON object per line with self-describing keys, e.g.
/// {"t":4,"ev":"assign","agent":2,"task":17}
std::string format_event(const TraceEvent& e);
void write_trace(std::ostream& out, const Trace& trace);
std::string format_trace(const Trace& trace);
/// Throws ParseError with the offending line number.
Trace read_trace(std::istream& in);

}  // namespace mapdd
