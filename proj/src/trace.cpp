#include "mapdd/trace.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "mapdd/error.hpp"

namespace mapdd {

namespace {

using json = nlohmann::ordered_json;

constexpr std::array<std::string_view, 11> kNames = {
    "release", "deadline_update", "assign", "unassign", "steal", "switch",
    "pickup",  "deliver",         "relocate", "stay",   "move",
};

json xy(Vertex v) { return json::array({v.x, v.y}); }

Vertex to_vertex(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

}  // namespace

std::string_view to_string(EventKind kind) { return kNames[static_cast<std::size_t>(kind)]; }

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (std::size_t k = 0; k < kNames.size(); ++k)
    if (kNames[k] == name) return static_cast<EventKind>(k);
  return std::nullopt;
}

std::string format_event(const TraceEvent& e) {
  json j;
  j["t"] = e.time;
  j["ev"] = to_string(e.kind);
  switch (e.kind) {
    case EventKind::release:
      j["task"] = e.task;
      break;
    case EventKind::deadline_update:
      j["task"] = e.task;
      j["d_d"] = e.delivery_deadline;
      j["d_p"] = e.pickup_deadline;
      if (e.dummy_length >= 0)
        j["dummy_len"] = e.dummy_length;
      else
        j["dummy_len"] = nullptr;
      j["free_dist"] = e.free_distance;
      break;
    case EventKind::assign:
    case EventKind::unassign:
    case EventKind::pickup:
      j["agent"] = e.agent;
      j["task"] = e.task;
      break;
    case EventKind::steal:
      j["agent"] = e.agent;
      j["task"] = e.task;
      j["from_agent"] = e.other_agent;
      break;
    case EventKind::switch_task:
      j["agent"] = e.agent;
      j["task"] = e.task;
      j["new_task"] = e.other_task;
      break;
    case EventKind::deliver:
      j["agent"] = e.agent;
      j["task"] = e.task;
      j["tardiness"] = e.tardiness;
      break;
    case EventKind::relocate:
      j["agent"] = e.agent;
      j["to"] = xy(e.to);
      break;
    case EventKind::stay:
      j["agent"] = e.agent;
      break;
    case EventKind::move:
      j["agent"] = e.agent;
      j["from"] = xy(e.from);
      j["to"] = xy(e.to);
      break;
  }
  return j.dump();
}

void write_trace(std::ostream& out, const Trace& trace) {
  for (const TraceEvent& e : trace) out << format_event(e) << '\n';
}

std::string format_trace(const Trace& trace) {
  std::ostringstream out;
  write_trace(out, trace);
  return out.str();
}

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      TraceEvent e;
      e.time = j.at("t").get<Timestep>();
      const auto kind = parse_event_kind(j.at("ev").get<std::string>());
      if (!kind) throw ParseError("unknown event kind", line_no);
      e.kind = *kind;
      if (j.contains("agent")) e.agent = j["agent"].get<AgentId>();
      if (j.contains("task")) e.task = j["task"].get<TaskId>();
      if (j.contains("from_agent")) e.other_agent = j["from_agent"].get<AgentId>();
      if (j.contains("new_task")) e.other_task = j["new_task"].get<TaskId>();
      if (j.contains("from")) e.from = to_vertex(j["from"]);
      if (j.contains("to")) e.to = to_vertex(j["to"]);
      if (j.contains("d_d")) e.delivery_deadline = j["d_d"].get<Timestep>();
      if (j.contains("d_p")) e.pickup_deadline = j["d_p"].get<Timestep>();
      if (j.contains("dummy_len") && !j["dummy_len"].is_null()) e.dummy_length = j["dummy_len"].get<Timestep>();
      if (j.contains("free_dist")) e.free_distance = j["free_dist"].get<Timestep>();
      if (j.contains("tardiness")) e.tardiness = j["tardiness"].get<Timestep>();
      trace.push_back(e);
    } catch (const json::exception& ex) {
      throw ParseError(std::string("malformed trace record: ") + ex.what(), line_no);
    }
  }
  return trace;
}

}  // namespace mapdd
