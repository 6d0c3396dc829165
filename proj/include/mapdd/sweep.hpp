#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "mapdd/instance.hpp"
#include "mapdd/scheduler.hpp"
#include "mapdd/simulator.hpp"

namespace mapdd {

/// An algorithm with its extension flags; alpha comes from the sweep grid.
struct ConfigVariant {
  Algorithm algorithm = Algorithm::dtp;
  bool swap = false;
  bool switching = false;

  friend bool operator==(const ConfigVariant&, const ConfigVariant&) = default;
};

/// dtp, dtpts+swap, dtpts+switch, dtpts+swap+switch.
std::vector<ConfigVariant> default_variants();
/// {0, 0.025, 0.05, 0.1, 0.2, 0.4}
std::vector<double> default_alpha_grid();

struct SweepSpec {
  /// Either generate from regimes x seeds ...
  std::shared_ptr<const GridMap> map;
  std::string map_path;
  std::vector<std::pair<ReleaseRegime, DeadlineRegime>> regimes;
  int num_agents = 15;
  int num_tasks = 151;
  /// ... or run a fixed instance set (then `seeds` only labels the rows).
  std::vector<Instance> instances;

  std::vector<ConfigVariant> variants = default_variants();
  std::vector<double> alphas = default_alpha_grid();
  std::vector<std::uint64_t> seeds;
  int workers = 1;
  RunOptions run_options;
};

/// One results-CSV record. Columns: instance_id, regime, algo, alpha, swap,
/// switch, seed, cumulative_tardiness, failure_count, makespan, wall_ms,
/// status ("ok" or "liveness").
struct SweepRow {
  std::string instance_id;
  std::string regime;
  std::string algo;
  double alpha = 0.0;
  bool swap = false;
  bool switching = false;
  std::uint64_t seed = 0;
  Timestep cumulative_tardiness = 0;
  int failure_count = 0;
  Timestep makespan = 0;
  double wall_ms = 0.0;
  std::string status = "ok";

  /// instance_id|algo|alpha|swap|switch|seed
  std::string key() const;
};

std::string format_alpha(double alpha);
std::string csv_header();
std::string format_row(const SweepRow& row);
/// Reads rows from a results CSV (header required). Throws ParseError.
std::vector<SweepRow> read_rows(std::istream& in);

/// Mean and sample standard deviation per (regime, algo, alpha, swap, switch).
struct SummaryRow {
  std::string regime;
  std::string algo;
  double alpha = 0.0;
  bool swap = false;
  bool switching = false;
  int runs = 0;
  double mean_tardiness = 0.0;
  double std_tardiness = 0.0;
  double mean_failures = 0.0;
  double std_failures = 0.0;
  int liveness_failures = 0;
};

std::vector<SummaryRow> summarize(const std::vector<SweepRow>& rows);
std::string summary_header();
std::string format_summary(const SummaryRow& row);

/// Executes every (instance, variant, alpha) job whose key is not in `skip`,
/// on spec.workers threads. `on_row` is called once per finished run from a
/// single thread at a time. Rows come out in completion order.
void run_sweep(const SweepSpec& spec, const std::set<std::string>& skip, const std::function<void(const SweepRow&)>& on_row);

/// The instance a sweep uses for (regime, seed).
Instance sweep_instance(const SweepSpec& spec, ReleaseRegime r, DeadlineRegime d, std::uint64_t seed);

}  // namespace mapdd
