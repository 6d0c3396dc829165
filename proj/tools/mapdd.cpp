// mapdd: generate instances, run simulations, sweep alpha grids, validate traces.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mapdd/error.hpp"
#include "mapdd/grid_map.hpp"
#include "mapdd/instance.hpp"
#include "mapdd/scheduler.hpp"
#include "mapdd/simulator.hpp"
#include "mapdd/sweep.hpp"
#include "mapdd/trace.hpp"

namespace fs = std::filesystem;
using namespace mapdd;

namespace {

enum ExitCode : int {
  kOk = 0,
  kViolations = 1,
  kUsage = 2,
  kInput = 3,
  kLiveness = 4,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int default_workers() {
  if (const char* env = std::getenv("MAPDD_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  // "1-30", "7", "1,4,9" or a mix.
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dash = part.find('-');
    try {
      if (dash == std::string::npos) {
        seeds.push_back(std::stoull(part));
      } else {
        const auto lo = std::stoull(part.substr(0, dash));
        const auto hi = std::stoull(part.substr(dash + 1));
        if (hi < lo) throw UsageError("empty seed range " + part);
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw UsageError("bad seed list '" + text + "'");
    }
  }
  if (seeds.empty()) throw UsageError("empty seed list");
  return seeds;
}

void append_row(const fs::path& csv, const SweepRow& row) {
  const bool fresh = !fs::exists(csv) || fs::file_size(csv) == 0;
  std::ofstream out(csv, std::ios::app);
  if (!out) throw InputError("cannot append to " + csv.string());
  if (fresh) out << csv_header() << '\n';
  out << format_row(row) << '\n';
}

fs::path summary_path(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension();
  return p.string() + ".summary.csv";
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::string map;
  int tasks = 151;
  int agents = 15;
  std::string release = "dense";
  std::string deadline = "short";
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  if (a.agents < 1) throw UsageError("--agents must be at least 1");
  if (a.tasks < 1) throw UsageError("--tasks must be at least 1");
  const auto rel = parse_release_regime(a.release);
  const auto dl = parse_deadline_regime(a.deadline);
  if (!rel) throw UsageError("--release must be dense or sparse");
  if (!dl) throw UsageError("--deadline must be short or long");
  auto map = std::make_shared<const GridMap>(load_map(a.map));
  GenSpec spec{a.map, a.agents, a.tasks, *rel, *dl, a.seed};
  const Instance inst = generate(spec, map);
  const fs::path out = a.out.empty() ? fs::path(inst.name + ".inst") : fs::path(a.out);
  save_instance(out, inst);
  std::cout << "wrote " << out.string() << ": " << inst.agent_starts.size() << " agents, " << inst.tasks.size()
            << " tasks, regime " << inst.regime << "\n";
  return kOk;
}

// ---------------------------------------------------------------- run

struct RunArgs {
  std::string instance;
  std::string algo = "dtp";
  double alpha = 0.0;
  bool swap = false;
  bool switching = false;
  std::uint64_t seed = 0;
  std::string csv;
  std::string trace;
  long long step_cap = 0;
};

int cmd_run(const RunArgs& a) {
  const auto algo = parse_algorithm(a.algo);
  if (!algo) throw UsageError("--algo must be one of tp, dtp, tpts, dtpts");
  SchedulerConfig cfg;
  try {
    cfg = SchedulerConfig::make(*algo, a.alpha, a.swap, a.switching);
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
  const LoadedInstance loaded = load_instance(a.instance);
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";

  RunOptions opts;
  opts.record_trace = !a.trace.empty();
  opts.step_cap = a.step_cap;
  const RunOutput out = run(loaded.instance, cfg, a.seed, opts);

  if (!a.trace.empty()) {
    std::ofstream t(a.trace, std::ios::binary);
    if (!t) throw InputError("cannot write trace " + a.trace);
    write_trace(t, out.trace);
  }
  SweepRow row;
  row.instance_id = loaded.instance.name;
  row.regime = loaded.instance.regime;
  row.algo = std::string(to_string(cfg.algorithm));
  row.alpha = cfg.alpha;
  row.swap = cfg.enable_swap;
  row.switching = cfg.enable_switch;
  row.seed = a.seed;
  row.cumulative_tardiness = out.result.cumulative_tardiness;
  row.failure_count = out.result.failure_count;
  row.makespan = out.result.makespan;
  row.wall_ms = out.result.wall_time.count();
  row.status = out.result.liveness_failure ? "liveness" : "ok";
  if (!a.csv.empty()) append_row(a.csv, row);
  std::cout << csv_header() << "\n" << format_row(row) << "\n";
  if (out.result.liveness_failure) {
    std::cerr << "liveness failure: step cap reached with " << out.result.completed << "/"
              << loaded.instance.tasks.size() << " tasks delivered\n";
    return kLiveness;
  }
  return kOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string map;
  std::vector<std::string> instances;
  std::string out = "results.csv";
  std::vector<std::string> regimes{"dense-short", "dense-long", "sparse-short", "sparse-long"};
  std::vector<std::string> configs{"dtp", "dtpts+swap", "dtpts+switch", "dtpts+swap+switch"};
  std::vector<double> alphas = default_alpha_grid();
  std::string seeds = "1-30";
  int agents = 15;
  int tasks = 151;
  int workers = 0;
};

ConfigVariant parse_variant(const std::string& text) {
  std::stringstream ss(text);
  std::string part;
  std::getline(ss, part, '+');
  const auto algo = parse_algorithm(part);
  if (!algo) throw UsageError("bad config '" + text + "'");
  ConfigVariant v{*algo, *algo == Algorithm::tpts, false};
  while (std::getline(ss, part, '+')) {
    if (part == "swap")
      v.swap = true;
    else if (part == "switch")
      v.switching = true;
    else
      throw UsageError("bad config flag '" + part + "' in '" + text + "'");
  }
  try {
    (void)SchedulerConfig::make(v.algorithm, 0.0, v.swap, v.switching);
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
  return v;
}

int cmd_sweep(const SweepArgs& a) {
  SweepSpec spec;
  spec.workers = a.workers > 0 ? a.workers : default_workers();
  spec.seeds = parse_seeds(a.seeds);
  spec.alphas = a.alphas;
  for (double x : spec.alphas)
    if (!(x >= 0.0 && x <= 1.0)) throw UsageError("alpha values must lie in [0, 1]");
  if (spec.alphas.empty()) throw UsageError("empty alpha grid");
  spec.variants.clear();
  for (const auto& c : a.configs) spec.variants.push_back(parse_variant(c));
  spec.num_agents = a.agents;
  spec.num_tasks = a.tasks;

  if (!a.instances.empty()) {
    for (const auto& p : a.instances) spec.instances.push_back(load_instance(p).instance);
  } else {
    if (a.map.empty()) throw UsageError("sweep needs --map or --instances");
    spec.map_path = a.map;
    spec.map = std::make_shared<const GridMap>(load_map(a.map));
    for (const auto& r : a.regimes) {
      const auto dash = r.find('-');
      const auto rel = dash == std::string::npos ? std::nullopt : parse_release_regime(r.substr(0, dash));
      const auto dl = dash == std::string::npos ? std::nullopt : parse_deadline_regime(r.substr(dash + 1));
      if (!rel || !dl) throw UsageError("bad regime '" + r + "' (expected e.g. dense-short)");
      spec.regimes.emplace_back(*rel, *dl);
    }
  }

  const fs::path csv(a.out);
  std::vector<SweepRow> rows;
  if (fs::exists(csv) && fs::file_size(csv) > 0) {
    std::ifstream in(csv);
    rows = read_rows(in);
  }
  std::set<std::string> done;
  for (const auto& r : rows) done.insert(r.key());
  const std::size_t resumed = rows.size();

  std::size_t failures = 0;
  run_sweep(spec, done, [&](const SweepRow& row) {
    append_row(csv, row);
    rows.push_back(row);
    if (row.status != "ok") ++failures;
    if (rows.size() % 100 == 0) std::cerr << rows.size() << " rows\n";
  });

  const fs::path summary = summary_path(csv);
  std::ofstream s(summary);
  s << summary_header() << '\n';
  for (const auto& row : summarize(rows)) s << format_summary(row) << '\n';
  std::cout << "sweep: " << rows.size() - resumed << " new rows (" << resumed << " resumed), " << failures
            << " failed; results in " << csv.string() << ", summary in " << summary.string() << "\n";
  return kOk;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
  std::string instance;
  std::string trace;
};

int cmd_validate(const ValidateArgs& a) {
  const LoadedInstance loaded = load_instance(a.instance);
  std::ifstream in(a.trace, std::ios::binary);
  if (!in) throw InputError("cannot open trace " + a.trace);
  const Trace trace = read_trace(in);
  const ValidationReport rep = validate_trace(trace, loaded.instance);
  for (const auto& v : rep.violations) std::cout << "violation: " << v << "\n";
  std::cout << "events=" << trace.size() << " delivered=" << rep.delivered << "/" << loaded.instance.tasks.size()
            << " cumulative_tardiness=" << rep.cumulative_tardiness << " failure_count=" << rep.failure_count
            << " makespan=" << rep.makespan << " violations=" << rep.violations.size() << "\n";
  return rep.ok() ? kOk : kViolations;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online multi-agent pickup and delivery with task deadlines"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a random instance");
  g->add_option("--map", gen.map, "Map file")->required();
  g->add_option("--tasks", gen.tasks, "Number of tasks");
  g->add_option("--agents", gen.agents, "Number of agents");
  g->add_option("--release", gen.release, "Release regime: dense [0,300] or sparse [0,500]");
  g->add_option("--deadline", gen.deadline, "Deadline regime: short [20,80] or long [60,120]");
  g->add_option("--seed", gen.seed, "RNG seed");
  g->add_option("--out", gen.out, "Output instance file (default <regime>-s<seed>.inst)");

  RunArgs runa;
  auto* r = app.add_subcommand("run", "Simulate one instance");
  r->add_option("--instance", runa.instance, "Instance file")->required();
  r->add_option("--algo", runa.algo, "tp | dtp | tpts | dtpts");
  r->add_option("--alpha", runa.alpha, "Urgency weight in [0,1]");
  r->add_flag("--swap", runa.swap, "Task swapping among agents (dtpts)");
  r->add_flag("--switch", runa.switching, "Task switching on release (dtpts)");
  r->add_option("--seed", runa.seed, "Seed recorded with the result");
  r->add_option("--csv", runa.csv, "Append the result row to this CSV");
  r->add_option("--trace", runa.trace, "Write the JSONL event trace here");
  r->add_option("--step-cap", runa.step_cap, "Step limit (default 10 x (release span + tasks x diameter))");

  SweepArgs sw;
  auto* s = app.add_subcommand("sweep", "Run the alpha x config x seed grid");
  s->add_option("--map", sw.map, "Map file (instances are generated per regime and seed)");
  s->add_option("--instances", sw.instances, "Fixed instance files instead of generation");
  s->add_option("--out", sw.out, "Results CSV (appended; existing rows are skipped)");
  s->add_option("--regimes", sw.regimes, "Regimes, e.g. dense-short sparse-long");
  s->add_option("--configs", sw.configs, "Configs, e.g. dtp dtpts+swap dtpts+swap+switch");
  s->add_option("--alphas", sw.alphas, "Alpha grid");
  s->add_option("--seeds", sw.seeds, "Seeds, e.g. 1-30");
  s->add_option("--agents", sw.agents, "Agents per generated instance");
  s->add_option("--tasks", sw.tasks, "Tasks per generated instance");
  s->add_option("--workers", sw.workers, "Parallel runs (default $MAPDD_WORKERS or hardware threads)");

  ValidateArgs va;
  auto* v = app.add_subcommand("validate", "Check a trace against its instance");
  v->add_option("--instance", va.instance, "Instance file")->required();
  v->add_option("--trace", va.trace, "Trace file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (g->parsed()) return cmd_gen(gen);
    if (r->parsed()) return cmd_run(runa);
    if (s->parsed()) return cmd_sweep(sw);
    if (v->parsed()) return cmd_validate(va);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const LivenessError& e) {
    std::cerr << "liveness failure: " << e.what() << "\n";
    return kLiveness;
  }
  return kUsage;
}
