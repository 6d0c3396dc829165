#include "mapdd/instance.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "mapdd/error.hpp"
#include "mapdd/rng.hpp"

namespace mapdd {

namespace {

constexpr std::string_view kInstanceMagic = "mapd-d instance v1";

std::string hash_string(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, h);
  return buf;
}

std::string where(Vertex v) { return "(" + std::to_string(v.x) + "," + std::to_string(v.y) + ")"; }

}  // namespace

std::string_view to_string(ReleaseRegime r) { return r == ReleaseRegime::dense ? "dense" : "sparse"; }
std::string_view to_string(DeadlineRegime r) { return r == DeadlineRegime::short_deadline ? "short" : "long"; }

std::optional<ReleaseRegime> parse_release_regime(std::string_view s) {
  if (s == "dense") return ReleaseRegime::dense;
  if (s == "sparse") return ReleaseRegime::sparse;
  return std::nullopt;
}

std::optional<DeadlineRegime> parse_deadline_regime(std::string_view s) {
  if (s == "short") return DeadlineRegime::short_deadline;
  if (s == "long") return DeadlineRegime::long_deadline;
  return std::nullopt;
}

Range release_range(ReleaseRegime r) { return r == ReleaseRegime::dense ? Range{0, 300} : Range{0, 500}; }
Range deadline_range(DeadlineRegime r) {
  return r == DeadlineRegime::short_deadline ? Range{20, 80} : Range{60, 120};
}

std::string regime_label(ReleaseRegime r, DeadlineRegime d) {
  return std::string(to_string(r)) + "-" + std::string(to_string(d));
}

bool operator==(const Instance& a, const Instance& b) {
  const bool maps_equal = (a.map == b.map) || (a.map && b.map && *a.map == *b.map);
  return maps_equal && a.name == b.name && a.regime == b.regime && a.map_path == b.map_path &&
         a.agent_starts == b.agent_starts && a.tasks == b.tasks;
}

Instance generate(const GenSpec& spec, std::shared_ptr<const GridMap> map) {
  if (!map) throw InputError("generate: no map");
  if (spec.num_agents < 1) throw InputError("need at least one agent");
  if (spec.num_tasks < 1) throw InputError("need at least one task");
  const auto& parking = map->non_task_endpoints();
  const auto& task_eps = map->task_endpoints();
  if (static_cast<std::size_t>(spec.num_agents) > parking.size())
    throw InputError(std::to_string(spec.num_agents) + " agents exceed the " + std::to_string(parking.size()) +
                     " non-task endpoints of the map");
  if (task_eps.size() < 2) throw InputError("map needs at least two task endpoints");

  Rng rng(spec.seed);
  Instance inst;
  inst.regime = regime_label(spec.release, spec.deadline);
  inst.name = inst.regime + "-s" + std::to_string(spec.seed);
  inst.map_path = spec.map_path;
  inst.map = map;

  for (std::size_t i : sample_without_replacement(rng, parking.size(), static_cast<std::size_t>(spec.num_agents)))
    inst.agent_starts.push_back(parking[i]);

  const Range rel = release_range(spec.release);
  const Range dur = deadline_range(spec.deadline);
  const auto last_ep = static_cast<std::int64_t>(task_eps.size()) - 1;
  for (int j = 0; j < spec.num_tasks; ++j) {
    Task t;
    t.id = j;
    t.release_time = uniform_int(rng, rel.lo, rel.hi);
    t.delivery_deadline = t.release_time + uniform_int(rng, dur.lo, dur.hi);
    t.pickup = task_eps[static_cast<std::size_t>(uniform_int(rng, 0, last_ep))];
    do {
      t.delivery = task_eps[static_cast<std::size_t>(uniform_int(rng, 0, last_ep))];
    } while (t.delivery == t.pickup);
    inst.tasks.push_back(t);
  }
  return inst;
}

std::string format_instance(const Instance& inst) {
  std::ostringstream out;
  out << kInstanceMagic << '\n';
  out << "name " << inst.name << '\n';
  out << "regime " << inst.regime << '\n';
  out << "map " << inst.map_path << ' ' << hash_string(inst.map ? inst.map->content_hash() : 0) << '\n';
  out << "agents " << inst.agent_starts.size() << '\n';
  for (Vertex v : inst.agent_starts) out << v.x << ' ' << v.y << '\n';
  out << "tasks " << inst.tasks.size() << '\n';
  out << "# id release pickup_x pickup_y delivery_x delivery_y deadline\n";
  for (const Task& t : inst.tasks)
    out << t.id << ' ' << t.release_time << ' ' << t.pickup.x << ' ' << t.pickup.y << ' ' << t.delivery.x << ' '
        << t.delivery.y << ' ' << t.delivery_deadline << '\n';
  return out.str();
}

void save_instance(const std::filesystem::path& path, const Instance& inst) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write instance file " + path.string());
  out << format_instance(inst);
  if (!out) throw InputError("failed writing instance file " + path.string());
}

namespace {

// Line-oriented reader that skips blank lines and '#' comments.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string& line) {
    while (pos_ < text_.size()) {
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      std::string_view raw = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      ++line_no_;
      while (!raw.empty() && (raw.back() == '\r' || raw.back() == ' ' || raw.back() == '\t')) raw.remove_suffix(1);
      if (raw.empty() || raw.front() == '#') continue;
      line.assign(raw);
      return true;
    }
    return false;
  }

  std::string expect(std::string_view what) {
    std::string line;
    if (!next(line)) throw ParseError("unexpected end of file, expected " + std::string(what), line_no_ + 1);
    return line;
  }

  int line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
};

std::pair<std::string, std::string> keyword(const std::string& line) {
  const auto sp = line.find(' ');
  if (sp == std::string::npos) return {line, ""};
  return {line.substr(0, sp), line.substr(sp + 1)};
}

std::size_t parse_count(const std::string& s, const LineReader& r) {
  std::istringstream in(s);
  long long n = -1;
  std::string rest;
  if (!(in >> n) || (in >> rest) || n < 0) throw ParseError("malformed count '" + s + "'", r.line_no());
  return static_cast<std::size_t>(n);
}

}  // namespace

LoadedInstance parse_instance(std::string_view text, std::shared_ptr<const GridMap> map) {
  if (!map) throw InputError("parse_instance: no map");
  LoadedInstance result;
  Instance& inst = result.instance;
  inst.map = map;
  LineReader r(text);

  const std::string magic = r.expect("header");
  if (magic != kInstanceMagic) {
    if (magic.rfind("mapd-d instance", 0) == 0)
      throw InputError("unsupported instance version '" + magic + "', expected '" + std::string(kInstanceMagic) + "'");
    throw ParseError("expected header '" + std::string(kInstanceMagic) + "'", r.line_no());
  }

  std::string line;
  for (;;) {
    line = r.expect("'agents' section");
    auto [key, value] = keyword(line);
    if (key == "name") {
      inst.name = value;
    } else if (key == "regime") {
      inst.regime = value;
    } else if (key == "map") {
      const auto sp = value.rfind(' ');
      if (sp == std::string::npos) throw ParseError("expected 'map <path> <digest>'", r.line_no());
      inst.map_path = value.substr(0, sp);
      const std::string digest = value.substr(sp + 1);
      if (digest != hash_string(map->content_hash()))
        throw InputError("map digest mismatch: instance expects " + digest + ", map has " +
                         hash_string(map->content_hash()));
    } else if (key == "agents") {
      const std::size_t n = parse_count(value, r);
      for (std::size_t i = 0; i < n; ++i) {
        std::istringstream in(r.expect("agent start"));
        Vertex v;
        std::string rest;
        if (!(in >> v.x >> v.y) || (in >> rest)) throw ParseError("expected '<x> <y>' agent start", r.line_no());
        if (!map->in_bounds(v)) throw InputError("agent " + std::to_string(i) + " start " + where(v) + " out of bounds");
        if (!map->passable(v)) throw InputError("agent " + std::to_string(i) + " starts on an obstacle " + where(v));
        if (map->kind(v) != CellKind::non_task_endpoint)
          result.warnings.push_back("agent " + std::to_string(i) + " does not start on a non-task endpoint " + where(v));
        inst.agent_starts.push_back(v);
      }
      break;
    } else {
      throw ParseError("unknown keyword '" + key + "'", r.line_no());
    }
  }
  std::set<Vertex> seen(inst.agent_starts.begin(), inst.agent_starts.end());
  if (seen.size() != inst.agent_starts.size()) throw InputError("agent starts are not distinct");

  {
    auto [key, value] = keyword(r.expect("'tasks' section"));
    if (key != "tasks") throw ParseError("expected 'tasks <count>'", r.line_no());
    const std::size_t n = parse_count(value, r);
    for (std::size_t i = 0; i < n; ++i) {
      std::istringstream in(r.expect("task record"));
      Task t;
      std::string rest;
      if (!(in >> t.id >> t.release_time >> t.pickup.x >> t.pickup.y >> t.delivery.x >> t.delivery.y >>
            t.delivery_deadline) ||
          (in >> rest))
        throw ParseError("expected 'id release px py dx dy deadline'", r.line_no());
      const std::string tag = "task " + std::to_string(t.id);
      if (t.id != static_cast<TaskId>(i)) throw InputError(tag + ": ids must be 0..n-1 in order");
      if (t.release_time < 0) throw InputError(tag + ": negative release time");
      for (auto [v, role] : {std::pair{t.pickup, "pickup"}, std::pair{t.delivery, "delivery"}}) {
        if (!map->in_bounds(v)) throw InputError(tag + ": " + role + " " + where(v) + " out of bounds");
        if (map->kind(v) != CellKind::task_endpoint)
          throw InputError(tag + ": " + role + " " + where(v) + " is not a task endpoint");
      }
      if (t.pickup == t.delivery) throw InputError(tag + ": pickup equals delivery");
      inst.tasks.push_back(t);
    }
  }
  if (r.next(line)) throw ParseError("trailing content after task list", r.line_no());

  const WellFormedReport wf = check_well_formed(*map, inst.agent_starts.size());
  if (!wf.agents_fit_endpoints)
    result.warnings.push_back("not well-formed: " + std::to_string(wf.num_agents) + " agents but only " +
                              std::to_string(wf.num_non_task_endpoints) + " non-task endpoints");
  if (!wf.endpoints_connected)
    result.warnings.push_back("not well-formed: " + std::to_string(wf.disconnected_pairs.size()) +
                              " endpoint pairs are only connected through other endpoints");
  return result;
}

LoadedInstance load_instance(const std::filesystem::path& path, std::shared_ptr<const GridMap> map_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open instance file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::shared_ptr<const GridMap> map = std::move(map_override);
  if (!map) {
    LineReader r(text);
    std::string line;
    std::string map_path;
    while (r.next(line)) {
      auto [key, value] = keyword(line);
      if (key == "map") {
        const auto sp = value.rfind(' ');
        map_path = sp == std::string::npos ? value : value.substr(0, sp);
        break;
      }
      if (key == "agents") break;
    }
    if (map_path.empty()) throw ParseError("instance names no map", r.line_no());
    std::filesystem::path p(map_path);
    if (!std::filesystem::exists(p) && p.is_relative()) p = path.parent_path() / p;
    map = std::make_shared<const GridMap>(load_map(p));
  }
  return parse_instance(text, std::move(map));
}

}  // namespace mapdd
