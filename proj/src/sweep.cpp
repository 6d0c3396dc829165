#include "mapdd/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "mapdd/error.hpp"

namespace mapdd {

std::vector<ConfigVariant> default_variants() {
  return {{Algorithm::dtp, false, false},
          {Algorithm::dtpts, true, false},
          {Algorithm::dtpts, false, true},
          {Algorithm::dtpts, true, true}};
}

std::vector<double> default_alpha_grid() { return {0.0, 0.025, 0.05, 0.1, 0.2, 0.4}; }

std::string format_alpha(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", alpha);
  return buf;
}

std::string SweepRow::key() const {
  return instance_id + "|" + algo + "|" + format_alpha(alpha) + "|" + (swap ? "1" : "0") + "|" +
         (switching ? "1" : "0") + "|" + std::to_string(seed);
}

std::string csv_header() {
  return "instance_id,regime,algo,alpha,swap,switch,seed,cumulative_tardiness,failure_count,makespan,wall_ms,status";
}

std::string format_row(const SweepRow& r) {
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.3f", r.wall_ms);
  std::ostringstream out;
  out << r.instance_id << ',' << r.regime << ',' << r.algo << ',' << format_alpha(r.alpha) << ',' << (r.swap ? 1 : 0)
      << ',' << (r.switching ? 1 : 0) << ',' << r.seed << ',' << r.cumulative_tardiness << ',' << r.failure_count << ','
      << r.makespan << ',' << wall << ',' << r.status;
  return out.str();
}

std::vector<SweepRow> read_rows(std::istream& in) {
  std::vector<SweepRow> rows;
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) return rows;
  ++line_no;
  if (line != csv_header()) throw ParseError("unexpected results header", line_no);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 12) throw ParseError("expected 12 columns", line_no);
    try {
      SweepRow r;
      r.instance_id = f[0];
      r.regime = f[1];
      r.algo = f[2];
      r.alpha = std::stod(f[3]);
      r.swap = f[4] == "1";
      r.switching = f[5] == "1";
      r.seed = std::stoull(f[6]);
      r.cumulative_tardiness = std::stoll(f[7]);
      r.failure_count = std::stoi(f[8]);
      r.makespan = std::stoll(f[9]);
      r.wall_ms = std::stod(f[10]);
      r.status = f[11];
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ParseError("malformed numeric field", line_no);
    }
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<SweepRow>& rows) {
  using Key = std::tuple<std::string, std::string, std::string, bool, bool>;
  struct Acc {
    double alpha = 0;
    std::vector<double> tard;
    std::vector<double> fail;
    int liveness = 0;
  };
  std::map<Key, Acc> cells;
  for (const SweepRow& r : rows) {
    Acc& acc = cells[{r.regime, r.algo, format_alpha(r.alpha), r.swap, r.switching}];
    acc.alpha = r.alpha;
    acc.tard.push_back(static_cast<double>(r.cumulative_tardiness));
    acc.fail.push_back(static_cast<double>(r.failure_count));
    if (r.status != "ok") ++acc.liveness;
  }
  auto mean_std = [](const std::vector<double>& v) {
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    return std::pair{mean, sd};
  };
  std::vector<SummaryRow> out;
  for (const auto& [key, acc] : cells) {
    SummaryRow s;
    s.regime = std::get<0>(key);
    s.algo = std::get<1>(key);
    s.alpha = acc.alpha;
    s.swap = std::get<3>(key);
    s.switching = std::get<4>(key);
    s.runs = static_cast<int>(acc.tard.size());
    std::tie(s.mean_tardiness, s.std_tardiness) = mean_std(acc.tard);
    std::tie(s.mean_failures, s.std_failures) = mean_std(acc.fail);
    s.liveness_failures = acc.liveness;
    out.push_back(s);
  }
  return out;
}

std::string summary_header() {
  return "regime,algo,alpha,swap,switch,runs,mean_cumulative_tardiness,std_cumulative_tardiness,mean_failure_count,"
         "std_failure_count,liveness_failures";
}

std::string format_summary(const SummaryRow& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%s,%s,%d,%d,%d,%.6f,%.6f,%.6f,%.6f,%d", s.regime.c_str(), s.algo.c_str(),
                format_alpha(s.alpha).c_str(), s.swap ? 1 : 0, s.switching ? 1 : 0, s.runs, s.mean_tardiness,
                s.std_tardiness, s.mean_failures, s.std_failures, s.liveness_failures);
  return buf;
}

Instance sweep_instance(const SweepSpec& spec, ReleaseRegime r, DeadlineRegime d, std::uint64_t seed) {
  GenSpec g;
  g.map_path = spec.map_path;
  g.num_agents = spec.num_agents;
  g.num_tasks = spec.num_tasks;
  g.release = r;
  g.deadline = d;
  g.seed = seed;
  return generate(g, spec.map);
}

void run_sweep(const SweepSpec& spec, const std::set<std::string>& skip,
               const std::function<void(const SweepRow&)>& on_row) {
  struct Labeled {
    Instance instance;
    std::uint64_t seed;
  };
  std::vector<Labeled> instances;
  if (!spec.instances.empty()) {
    const std::uint64_t label = spec.seeds.empty() ? 0 : spec.seeds.front();
    for (const Instance& inst : spec.instances) instances.push_back({inst, label});
  } else {
    for (auto [r, d] : spec.regimes)
      for (std::uint64_t seed : spec.seeds) instances.push_back({sweep_instance(spec, r, d, seed), seed});
  }
  if (instances.empty()) return;

  struct Job {
    std::size_t instance;
    SchedulerConfig cfg;
    SweepRow row;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (const ConfigVariant& v : spec.variants) {
      const bool fixed_alpha = v.algorithm == Algorithm::tp || v.algorithm == Algorithm::tpts;
      const std::vector<double> alphas = fixed_alpha ? std::vector<double>{0.0} : spec.alphas;
      for (double alpha : alphas) {
        Job job{i, SchedulerConfig::make(v.algorithm, alpha, v.swap, v.switching), {}};
        SweepRow& row = job.row;
        row.instance_id = instances[i].instance.name;
        row.regime = instances[i].instance.regime;
        row.algo = std::string(to_string(job.cfg.algorithm));
        row.alpha = job.cfg.alpha;
        row.swap = job.cfg.enable_swap;
        row.switching = job.cfg.enable_switch;
        row.seed = instances[i].seed;
        if (skip.count(row.key()) == 0) jobs.push_back(std::move(job));
      }
    }
  }

  // Instances of one sweep share a map unless an explicit set says otherwise.
  std::map<const GridMap*, std::unique_ptr<DistanceTable>> tables;
  for (const Labeled& l : instances)
    if (!tables.count(l.instance.map.get())) tables.emplace(l.instance.map.get(), std::make_unique<DistanceTable>(*l.instance.map));

  std::atomic<std::size_t> next{0};
  std::mutex out_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size()) return;
      Job& job = jobs[k];
      const Instance& inst = instances[job.instance].instance;
      RunOutput out = run(inst, job.cfg, instances[job.instance].seed, spec.run_options, *tables.at(inst.map.get()));
      SweepRow row = job.row;
      row.cumulative_tardiness = out.result.cumulative_tardiness;
      row.failure_count = out.result.failure_count;
      row.makespan = out.result.makespan;
      row.wall_ms = out.result.wall_time.count();
      row.status = out.result.liveness_failure ? "liveness" : "ok";
      std::lock_guard lock(out_mutex);
      on_row(row);
    }
  };
  const int n = std::max(1, spec.workers);
  if (n == 1) {
    worker();
    return;
  }
  std::vector<std::thread> threads;
  for (int i = 0; i < n; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
}

}  // namespace mapdd
