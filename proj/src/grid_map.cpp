#include "mapdd/grid_map.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mapdd/error.hpp"

namespace mapdd {

namespace {

constexpr std::string_view kMapMagic = "mapd-d map v1";

std::string_view trim_right(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(trim_right(text.substr(pos, end - pos)));
    pos = end + 1;
  }
  return lines;
}

// Flood fill from the first passable cell; returns the first passable
// cell not reached, or -1 when everything is connected.
int first_disconnected(int width, int height, const std::vector<CellKind>& cells) {
  const int n = width * height;
  int start = -1;
  for (int i = 0; i < n; ++i) {
    if (cells[i] != CellKind::obstacle) {
      start = i;
      break;
    }
  }
  if (start < 0) return -1;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{start};
  seen[start] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    const int ux = u % width;
    const int uy = u / width;
    const int cand[4] = {uy > 0 ? u - width : -1, uy + 1 < height ? u + width : -1,
                         ux > 0 ? u - 1 : -1, ux + 1 < width ? u + 1 : -1};
    for (int v : cand) {
      if (v >= 0 && !seen[v] && cells[v] != CellKind::obstacle) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  for (int i = 0; i < n; ++i)
    if (cells[i] != CellKind::obstacle && !seen[i]) return i;
  return -1;
}

}  // namespace

GridMap::GridMap(int width, int height, std::vector<CellKind> cells)
    : width_(width), height_(height), cells_(std::move(cells)) {
  if (width_ < 1 || height_ < 1) throw InputError("map dimensions must be at least 1x1");
  if (cells_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_))
    throw InputError("cell count does not match map dimensions");
  for (VertexIndex i = 0; i < num_cells(); ++i) {
    switch (cells_[i]) {
      case CellKind::obstacle:
        break;
      case CellKind::free:
        ++num_free_;
        break;
      case CellKind::task_endpoint:
        ++num_free_;
        task_endpoints_.push_back(vertex(i));
        endpoints_.push_back(vertex(i));
        break;
      case CellKind::non_task_endpoint:
        ++num_free_;
        non_task_endpoints_.push_back(vertex(i));
        endpoints_.push_back(vertex(i));
        break;
    }
  }
  if (num_free_ == 0) throw InputError("map has no passable cells");
  if (VertexIndex bad = first_disconnected(width_, height_, cells_); bad >= 0) {
    Vertex v = vertex(bad);
    throw InputError("free space is disconnected at (" + std::to_string(v.x) + "," +
                     std::to_string(v.y) + ")");
  }
}

int GridMap::neighbors(VertexIndex i, VertexIndex out[4]) const {
  const int x = i % width_;
  const int y = i / width_;
  int c = 0;
  if (y > 0 && passable(i - width_)) out[c++] = i - width_;
  if (y + 1 < height_ && passable(i + width_)) out[c++] = i + width_;
  if (x > 0 && passable(i - 1)) out[c++] = i - 1;
  if (x + 1 < width_ && passable(i + 1)) out[c++] = i + 1;
  return c;
}

std::uint64_t GridMap::content_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint8_t b) {
    h ^= b;
    h *= 1099511628211ULL;
  };
  for (int shift = 0; shift < 32; shift += 8) mix(static_cast<std::uint8_t>(width_ >> shift));
  for (int shift = 0; shift < 32; shift += 8) mix(static_cast<std::uint8_t>(height_ >> shift));
  for (CellKind k : cells_) mix(static_cast<std::uint8_t>(k));
  return h;
}

GridMap parse_map(std::string_view text) {
  auto lines = split_lines(text);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines[0] != kMapMagic)
    throw ParseError("expected header '" + std::string(kMapMagic) + "'", 1);
  if (lines.size() < 2) throw ParseError("missing '<width> <height>' line", 2);

  int width = 0;
  int height = 0;
  {
    std::istringstream dims{std::string(lines[1])};
    std::string rest;
    if (!(dims >> width >> height) || (dims >> rest) || width < 1 || height < 1)
      throw ParseError("malformed '<width> <height>' line", 2);
  }
  if (lines.size() != static_cast<std::size_t>(height) + 2)
    throw ParseError("expected " + std::to_string(height) + " rows, found " +
                         std::to_string(lines.size() - 2),
                     static_cast<int>(std::min(lines.size(), static_cast<std::size_t>(height) + 2)) + 1);

  std::vector<CellKind> cells;
  cells.reserve(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const std::string_view row = lines[y + 2];
    const int line_no = y + 3;
    if (row.size() != static_cast<std::size_t>(width))
      throw ParseError("ragged row: expected " + std::to_string(width) + " cells, found " +
                           std::to_string(row.size()),
                       line_no, static_cast<int>(std::min(row.size(), static_cast<std::size_t>(width))) + 1);
    for (int x = 0; x < width; ++x) {
      switch (row[x]) {
        case '@': cells.push_back(CellKind::obstacle); break;
        case '.': cells.push_back(CellKind::free); break;
        case 'T': cells.push_back(CellKind::task_endpoint); break;
        case 'E': cells.push_back(CellKind::non_task_endpoint); break;
        default:
          throw ParseError(std::string("unknown cell character '") + row[x] + "'", line_no, x + 1);
      }
    }
  }

  if (int bad = first_disconnected(width, height, cells); bad >= 0)
    throw ParseError("free space is disconnected", bad / width + 3, bad % width + 1);
  return GridMap(width, height, std::move(cells));
}

GridMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open map file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_map(buf.str());
}

std::string format_map(const GridMap& map) {
  std::string out(kMapMagic);
  out += '\n';
  out += std::to_string(map.width()) + " " + std::to_string(map.height()) + "\n";
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      switch (map.kind(Vertex{x, y})) {
        case CellKind::obstacle: out += '@'; break;
        case CellKind::free: out += '.'; break;
        case CellKind::task_endpoint: out += 'T'; break;
        case CellKind::non_task_endpoint: out += 'E'; break;
      }
    }
    out += '\n';
  }
  return out;
}

DistanceField bfs_distance(const GridMap& map, Vertex source) {
  DistanceField field{source, std::vector<int>(map.num_cells(), kUnreachable)};
  if (!map.passable(source)) return field;
  std::vector<VertexIndex> queue;
  queue.reserve(map.num_free());
  const VertexIndex s = map.index(source);
  field.dist[s] = 0;
  queue.push_back(s);
  VertexIndex nb[4];
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const VertexIndex u = queue[head];
    for (int k = 0, c = map.neighbors(u, nb); k < c; ++k) {
      if (field.dist[nb[k]] == kUnreachable) {
        field.dist[nb[k]] = field.dist[u] + 1;
        queue.push_back(nb[k]);
      }
    }
  }
  return field;
}

DistanceTable::DistanceTable(const GridMap& map)
    : n_(static_cast<std::size_t>(map.num_cells())), dist_(n_ * n_, kUnreachable) {
  for (VertexIndex s = 0; s < map.num_cells(); ++s) {
    if (!map.passable(s)) continue;
    DistanceField f = bfs_distance(map, map.vertex(s));
    std::copy(f.dist.begin(), f.dist.end(), dist_.begin() + static_cast<std::ptrdiff_t>(s * n_));
    for (int d : f.dist)
      if (d != kUnreachable) diameter_ = std::max(diameter_, d);
  }
}

WellFormedReport check_well_formed(const GridMap& map, std::size_t num_agents) {
  WellFormedReport report;
  report.num_agents = num_agents;
  report.num_non_task_endpoints = map.non_task_endpoints().size();
  report.agents_fit_endpoints = num_agents <= report.num_non_task_endpoints;

  const auto& eps = map.endpoints();
  std::vector<char> is_ep(map.num_cells(), 0);
  for (Vertex e : eps) is_ep[map.index(e)] = 1;

  // One BFS per source endpoint; other endpoints may be reached but not
  // expanded, so a reached endpoint is connected without traversing others.
  std::vector<int> mark(map.num_cells(), -1);
  std::vector<VertexIndex> queue;
  VertexIndex nb[4];
  for (std::size_t si = 0; si < eps.size(); ++si) {
    const VertexIndex s = map.index(eps[si]);
    const int stamp = static_cast<int>(si);
    queue.clear();
    queue.push_back(s);
    mark[s] = stamp;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const VertexIndex u = queue[head];
      if (u != s && is_ep[u]) continue;
      for (int k = 0, c = map.neighbors(u, nb); k < c; ++k) {
        if (mark[nb[k]] != stamp) {
          mark[nb[k]] = stamp;
          queue.push_back(nb[k]);
        }
      }
    }
    for (Vertex t : eps) {
      if (t == eps[si]) continue;
      if (mark[map.index(t)] != stamp) report.disconnected_pairs.emplace_back(eps[si], t);
    }
  }
  report.endpoints_connected = report.disconnected_pairs.empty();
  return report;
}

}  // namespace mapdd
