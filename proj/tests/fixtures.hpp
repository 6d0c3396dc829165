#pragma once

// Instance builders shared by the unit and acceptance tests.

#include <memory>
#include <string>
#include <vector>

#include "mapdd/error.hpp"
#include "mapdd/grid_map.hpp"
#include "mapdd/instance.hpp"
#include "mapdd/rng.hpp"

namespace fixtures {

inline std::string asset(const std::string& name) { return std::string(MAPDD_ASSET_DIR) + "/" + name; }

inline std::shared_ptr<const mapdd::GridMap> map_from(const std::string& rows) {
  return std::make_shared<const mapdd::GridMap>(mapdd::parse_map(rows));
}

/// Random well-formed map for `agents` agents: obstacles never touch the
/// border ring, endpoints are scattered over free cells. Retries until the
/// well-formedness check passes.
inline std::shared_ptr<const mapdd::GridMap> random_map(mapdd::Rng& rng, int agents) {
  using mapdd::CellKind;
  for (;;) {
    const int w = static_cast<int>(mapdd::uniform_int(rng, 7, 14));
    const int h = static_cast<int>(mapdd::uniform_int(rng, 6, 10));
    std::vector<CellKind> cells(static_cast<std::size_t>(w * h), CellKind::free);
    std::vector<std::size_t> free_cells;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const bool ring = x == 0 || y == 0 || x == w - 1 || y == h - 1;
        const std::size_t i = static_cast<std::size_t>(y * w + x);
        if (!ring && mapdd::uniform_int(rng, 0, 99) < 18)
          cells[i] = CellKind::obstacle;
        else
          free_cells.push_back(i);
      }
    }
    const auto n_e = static_cast<std::size_t>(agents + mapdd::uniform_int(rng, 0, 3));
    const auto n_t = static_cast<std::size_t>(mapdd::uniform_int(rng, 4, 10));
    if (n_e + n_t > free_cells.size() / 2) continue;
    const auto pick = mapdd::sample_without_replacement(rng, free_cells.size(), n_e + n_t);
    for (std::size_t k = 0; k < pick.size(); ++k)
      cells[free_cells[pick[k]]] = k < n_e ? CellKind::non_task_endpoint : CellKind::task_endpoint;
    try {
      auto map = std::make_shared<const mapdd::GridMap>(w, h, std::move(cells));
      if (mapdd::check_well_formed(*map, static_cast<std::size_t>(agents)).ok()) return map;
    } catch (const mapdd::InputError&) {
      // disconnected; draw again
    }
  }
}

/// Agents on distinct non-task endpoints, tasks between distinct task
/// endpoints with releases in [0, max_release] and deadline durations in
/// [min_dur, max_dur].
inline mapdd::Instance random_instance(mapdd::Rng& rng, std::shared_ptr<const mapdd::GridMap> map, int agents,
                                       int tasks, mapdd::Timestep max_release, mapdd::Timestep min_dur,
                                       mapdd::Timestep max_dur, const std::string& name) {
  mapdd::Instance inst;
  inst.name = name;
  inst.regime = "fuzz";
  inst.map_path = "<memory>";
  inst.map = map;
  const auto& ne = map->non_task_endpoints();
  for (std::size_t k : mapdd::sample_without_replacement(rng, ne.size(), static_cast<std::size_t>(agents)))
    inst.agent_starts.push_back(ne[k]);
  const auto& te = map->task_endpoints();
  const auto nt = static_cast<std::int64_t>(te.size());
  for (int j = 0; j < tasks; ++j) {
    mapdd::Task t;
    t.id = j;
    t.release_time = mapdd::uniform_int(rng, 0, max_release);
    t.delivery_deadline = t.release_time + mapdd::uniform_int(rng, min_dur, max_dur);
    t.pickup = te[static_cast<std::size_t>(mapdd::uniform_int(rng, 0, nt - 1))];
    do {
      t.delivery = te[static_cast<std::size_t>(mapdd::uniform_int(rng, 0, nt - 1))];
    } while (t.delivery == t.pickup);
    inst.tasks.push_back(t);
  }
  return inst;
}

/// 15x9 miniature of the warehouse layout: aisles around two shelf rows.
inline const char* kSmallWarehouse =
    "mapd-d map v1\n"
    "15 9\n"
    "...............\n"
    "E..T.T.T.T.T..E\n"
    "E..@@@@@@@@@..E\n"
    "E..T.T.T.T.T..E\n"
    "E.............E\n"
    "E..T.T.T.T.T..E\n"
    "E..@@@@@@@@@..E\n"
    "E..T.T.T.T.T..E\n"
    "...............\n";

/// 5x5 map for exhaustive comparisons.
inline const char* kTiny =
    "mapd-d map v1\n"
    "5 5\n"
    "E...E\n"
    ".T.T.\n"
    ".....\n"
    ".T.T.\n"
    "E...E\n";

}  // namespace fixtures
