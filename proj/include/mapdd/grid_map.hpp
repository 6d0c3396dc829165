#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mapdd {

/// Grid cell (column x, row y). Row 0 is the first map row in the file.
struct Vertex {
  int x = 0;
  int y = 0;

  friend constexpr auto operator<=>(const Vertex&, const Vertex&) = default;
};

/// True when a and b are equal or 4-neighbors.
constexpr bool adjacent_or_same(Vertex a, Vertex b) {
  const int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
  const int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
  return dx + dy <= 1;
}

enum class CellKind : std::uint8_t { obstacle, free, task_endpoint, non_task_endpoint };

/// Dense vertex index, y * width + x. Also the A* tie-break key.
using VertexIndex = std::int32_t;

/// 4-connected grid. Immutable once constructed; construction enforces
/// the connectivity and endpoint invariants.
class GridMap {
 public:
  GridMap(int width, int height, std::vector<CellKind> cells);

  int width() const { return width_; }
  int height() const { return height_; }
  int num_cells() const { return width_ * height_; }

  bool in_bounds(Vertex v) const { return v.x >= 0 && v.y >= 0 && v.x < width_ && v.y < height_; }
  VertexIndex index(Vertex v) const { return v.y * width_ + v.x; }
  Vertex vertex(VertexIndex i) const { return {i % width_, i / width_}; }

  CellKind kind(Vertex v) const { return cells_[index(v)]; }
  CellKind kind(VertexIndex i) const { return cells_[i]; }
  bool passable(Vertex v) const { return in_bounds(v) && kind(v) != CellKind::obstacle; }
  bool passable(VertexIndex i) const { return cells_[i] != CellKind::obstacle; }
  bool is_endpoint(VertexIndex i) const {
    return cells_[i] == CellKind::task_endpoint || cells_[i] == CellKind::non_task_endpoint;
  }
  bool is_endpoint(Vertex v) const { return is_endpoint(index(v)); }

  std::size_t num_free() const { return num_free_; }
  /// Sorted by vertex index.
  const std::vector<Vertex>& task_endpoints() const { return task_endpoints_; }
  const std::vector<Vertex>& non_task_endpoints() const { return non_task_endpoints_; }
  /// Task and non-task endpoints merged, sorted by vertex index.
  const std::vector<Vertex>& endpoints() const { return endpoints_; }

  /// Passable 4-neighbors in the fixed order up, down, left, right.
  /// Writes into out and returns the count.
  int neighbors(VertexIndex i, VertexIndex out[4]) const;

  /// Stable 64-bit FNV-1a digest of dimensions and cell kinds.
  std::uint64_t content_hash() const;

  friend bool operator==(const GridMap& a, const GridMap& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.cells_ == b.cells_;
  }

 private:
  int width_;
  int height_;
  std::vector<CellKind> cells_;
  std::size_t num_free_ = 0;
  std::vector<Vertex> task_endpoints_;
  std::vector<Vertex> non_task_endpoints_;
  std::vector<Vertex> endpoints_;
};

/// Parses the `mapd-d map v1` text format. Throws ParseError naming the
/// line/column for malformed headers, unknown characters, ragged rows and
/// disconnected free space.
GridMap parse_map(std::string_view text);
GridMap load_map(const std::filesystem::path& path);
std::string format_map(const GridMap& map);

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

/// Single-source shortest path lengths over 4-neighbor moves.
struct DistanceField {
  Vertex source;
  std::vector<int> dist;  // indexed by VertexIndex; kUnreachable for obstacles/unreachable cells

  int operator()(const GridMap& map, Vertex v) const { return dist[map.index(v)]; }
};

DistanceField bfs_distance(const GridMap& map, Vertex source);

/// All-pairs true distances between passable cells, built once per map
/// and shared read-only across runs.
class DistanceTable {
 public:
  explicit DistanceTable(const GridMap& map);

  int operator()(VertexIndex from, VertexIndex to) const {
    return dist_[static_cast<std::size_t>(from) * n_ + static_cast<std::size_t>(to)];
  }
  /// Longest finite shortest path.
  int diameter() const { return diameter_; }

 private:
  std::size_t n_;
  std::vector<std::int32_t> dist_;
  int diameter_ = 0;
};

struct WellFormedReport {
  bool finite_tasks = true;            // (a): task streams are finite by construction
  bool agents_fit_endpoints = true;    // (b)
  bool endpoints_connected = true;     // (c)
  std::size_t num_agents = 0;
  std::size_t num_non_task_endpoints = 0;
  /// Ordered endpoint pairs with no path avoiding every other endpoint.
  std::vector<std::pair<Vertex, Vertex>> disconnected_pairs;

  bool ok() const { return finite_tasks && agents_fit_endpoints && endpoints_connected; }
};

WellFormedReport check_well_formed(const GridMap& map, std::size_t num_agents);

}  // namespace mapdd
