#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mapdd/core.hpp"
#include "mapdd/grid_map.hpp"

namespace mapdd {

enum class ReleaseRegime : std::uint8_t { dense, sparse };
enum class DeadlineRegime : std::uint8_t { short_deadline, long_deadline };

std::string_view to_string(ReleaseRegime r);
std::string_view to_string(DeadlineRegime r);
std::optional<ReleaseRegime> parse_release_regime(std::string_view s);
std::optional<DeadlineRegime> parse_deadline_regime(std::string_view s);

struct Range {
  Timestep lo;
  Timestep hi;
};

/// Release times: dense [0, 300], sparse [0, 500].
Range release_range(ReleaseRegime r);
/// Deadline duration after release: short [20, 80], long [60, 120].
Range deadline_range(DeadlineRegime r);

/// "dense-short", "sparse-long", ...
std::string regime_label(ReleaseRegime r, DeadlineRegime d);

struct GenSpec {
  std::string map_path;
  int num_agents = 15;
  int num_tasks = 151;
  ReleaseRegime release = ReleaseRegime::dense;
  DeadlineRegime deadline = DeadlineRegime::short_deadline;
  std::uint64_t seed = 1;
};

struct Instance {
  std::string name;
  std::string regime;
  std::string map_path;
  std::shared_ptr<const GridMap> map;
  std::vector<Vertex> agent_starts;
  /// Ids are 0..n-1 in list order.
  std::vector<Task> tasks;

  friend bool operator==(const Instance& a, const Instance& b);
};

/// Draw order per seed: agent starts (uniform without replacement over the
/// non-task endpoints), then per task: release, deadline duration, pickup,
/// delivery (redrawn until it differs from the pickup). Throws InputError
/// when the spec does not fit the map.
Instance generate(const GenSpec& spec, std::shared_ptr<const GridMap> map);

/// `mapd-d instance v1` text.
std::string format_instance(const Instance& inst);
void save_instance(const std::filesystem::path& path, const Instance& inst);

struct LoadedInstance {
  Instance instance;
  /// Non-fatal findings, e.g. well-formedness violations.
  std::vector<std::string> warnings;
};

/// Parses instance text against an already loaded map. Throws ParseError for
/// syntax problems and InputError for semantic ones (map digest mismatch,
/// vertex out of bounds, pickup/delivery not a task endpoint, ...).
LoadedInstance parse_instance(std::string_view text, std::shared_ptr<const GridMap> map);

/// Reads an instance file; the map is taken from `map_override` or loaded
/// from the recorded path (as given, then relative to the instance file).
LoadedInstance load_instance(const std::filesystem::path& path, std::shared_ptr<const GridMap> map_override = nullptr);

}  // namespace mapdd
