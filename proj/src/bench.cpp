#include "prpmi/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <thread>

namespace prpmi {

int destination_bin(int destinations) {
  for (int b = 0; b < 4; ++b)
    if (destinations >= kDestinationBins[b].low && destinations <= kDestinationBins[b].high) return b;
  return -1;
}

std::vector<SuiteInstance> build_suite(std::uint64_t seed, int count, int horizon) {
  if (count < 4) throw std::invalid_argument("a suite needs at least one instance per bin (count >= 4)");
  std::mt19937_64 rng(seed);
  std::vector<SuiteInstance> suite;
  int made = 0;
  for (int b = 0; b < 4; ++b) {
    const int in_bin = count / 4 + (b < count % 4 ? 1 : 0);
    for (int i = 0; i < in_bin; ++i, ++made) {
      const DestinationBin& bin = kDestinationBins[b];
      const int nd = std::uniform_int_distribution<int>(bin.low, bin.high)(rng);
      std::vector<int> sources;
      for (int s = 1; s <= static_cast<int>(kSourceTable.size()); ++s)
        if (nd >= min_destinations(s) && nd <= max_destinations(s)) sources.push_back(s);
      const int ns = sources[std::uniform_int_distribution<std::size_t>(0, sources.size() - 1)(rng)];

      GenerationSpec spec;
      spec.n_sources = ns;
      spec.destinations = nd;
      spec.dest_ratio = std::clamp(static_cast<double>(nd) / ns, 4.33, 8.5);
      spec.storage_ratio = std::uniform_real_distribution<double>(1.26, 1.5)(rng);
      spec.demand_magnitude = made % 2 == 0 ? 85.0 : 130.0;
      spec.dissatisfaction = (made / 2) % 2 == 0 ? kLowDissatisfaction : kHighDissatisfaction;
      spec.horizon = horizon;
      spec.seed = rng();

      char id[16];
      std::snprintf(id, sizeof id, "i%03d", made);
      suite.push_back({id, b, spec, generate_instance(spec)});
    }
  }
  return suite;
}

SolveLimits bench_limits(const BenchOptions& options) {
  SolveLimits limits;
  if (options.deterministic) {
    limits.work_limit = options.limit_seconds * kWorkUnitsPerSecond;
    limits.wall_clock = options.limit_seconds * options.safety_factor;
  } else {
    limits.wall_clock = options.limit_seconds;
  }
  return limits;
}

namespace {

int method_rank(Method m) { return static_cast<int>(m); }

BenchRecord run_one(const SuiteInstance& si, Method m, const BenchOptions& options) {
  BenchRecord r;
  r.instance_id = si.id;
  r.method = m;
  r.bin = si.bin;
  r.sources = si.instance.source_count();
  r.destinations = si.instance.destination_count();
  r.storages = si.instance.storage_count();
  const auto start = std::chrono::steady_clock::now();
  try {
    const TimeExpandedGraph teg(si.instance);
    const MethodResult res = run_method(m, si.instance, teg, bench_limits(options), options.greedy, options.solver);
    r.status = res.status;
    r.work = res.work;
    r.hit_wall_clock = res.hit_wall_clock;
    r.note = res.note;
    if (res.solution) {
      r.cost = res.cost();
      r.unmet_kg = total_unmet_demand(si.instance, *res.solution);
    }
    if (m != Method::GH) {
      if (res.bound) r.bound = res.bound;
      r.gap = res.solution ? relative_gap(res.cost(), res.bound.value_or(-kInfinity)) : 1.0;
    }
  } catch (const std::exception& e) {
    r.status = SolveStatus::Error;
    r.note = e.what();
    if (m != Method::GH) r.gap = 1.0;
  }
  r.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

std::vector<BenchRecord> run_suite(const std::vector<SuiteInstance>& suite, const BenchOptions& options) {
  if (options.methods.empty()) throw std::invalid_argument("no methods to run");
  std::vector<std::pair<std::size_t, Method>> jobs;
  for (std::size_t i = 0; i < suite.size(); ++i)
    for (Method m : options.methods) jobs.emplace_back(i, m);
  std::vector<BenchRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++)
      records[k] = run_one(suite[jobs[k].first], jobs[k].second, options);
  };
  const int workers = std::max(1, std::min<int>(options.workers, static_cast<int>(jobs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::map<std::string, const BenchRecord*> best;
  for (const auto& r : records) {
    if (!r.cost) continue;
    auto& b = best[r.instance_id];
    if (!b || *r.cost < *b->cost) b = &r;
  }
  std::map<std::string, bool> satisfied;
  for (const auto& [id, r] : best) satisfied[id] = r->unmet_kg && *r->unmet_kg <= kUnmetTolerance;
  for (auto& r : records) r.demand_satisfied = satisfied[r.instance_id];

  std::sort(records.begin(), records.end(), [](const BenchRecord& a, const BenchRecord& b) {
    if (a.instance_id != b.instance_id) return a.instance_id < b.instance_id;
    return method_rank(a.method) < method_rank(b.method);
  });
  return records;
}

namespace {

std::vector<std::string> groups_of(const BenchRecord& r) {
  return {"all", kDestinationBins[r.bin].name, r.demand_satisfied ? "S_demand=yes" : "S_demand=no"};
}

std::optional<double> metric_of(const BenchRecord& r, const std::string& metric) {
  return metric == "cost" ? r.cost : r.gap;
}

}  // namespace

Summary summarize(const std::vector<BenchRecord>& records) {
  if (records.empty()) throw std::invalid_argument("no records to summarize");
  const std::vector<std::string> metrics{"cost", "gap"};
  std::vector<std::string> group_order{"all"};
  for (const auto& b : kDestinationBins) group_order.emplace_back(b.name);
  group_order.emplace_back("S_demand=yes");
  group_order.emplace_back("S_demand=no");
  std::set<Method> methods;
  for (const auto& r : records) methods.insert(r.method);

  Summary s;
  for (const auto& metric : metrics)
    for (const auto& g : group_order)
      for (Method m : methods) {
        std::vector<double> values;
        for (const auto& r : records) {
          if (r.method != m) continue;
          const auto gs = groups_of(r);
          if (std::find(gs.begin(), gs.end(), g) == gs.end()) continue;
          if (auto v = metric_of(r, metric)) values.push_back(*v);
        }
        if (!values.empty()) s.boxes.push_back({g, metric, m, box_stats(std::move(values))});
      }

  for (const auto& a : s.boxes)
    for (const auto& b : s.boxes) {
      if (a.group != b.group || a.metric != b.metric || a.method == b.method) continue;
      s.deltas.push_back({a.group, a.metric, a.method, b.method, delta_percent(a.stats.median, b.stats.median),
                          delta_percent(a.stats.mean, b.stats.mean)});
    }
  return s;
}

TrendCheck trend_check(const std::vector<BenchRecord>& records) {
  std::map<std::string, std::map<Method, const BenchRecord*>> by;
  for (const auto& r : records) by[r.instance_id][r.method] = &r;
  TrendCheck t;
  std::vector<double> best, greedy;
  int largest = -1;
  for (const auto& [id, ms] : by) {
    if (ms.size() != 3) throw std::invalid_argument("instance " + id + " lacks one of MA, RH, GH");
    const double ma = ms.at(Method::MA)->cost.value_or(kInfinity);
    const double rh = ms.at(Method::RH)->cost.value_or(kInfinity);
    const double gh = ms.at(Method::GH)->cost.value_or(kInfinity);
    best.push_back(std::min(ma, rh));
    greedy.push_back(gh);
    if (std::min(ma, rh) > gh) {
      char line[160];
      std::snprintf(line, sizeof line, "%s: min(MA, RH) = %.2f > GH = %.2f", id.c_str(), std::min(ma, rh), gh);
      t.log.emplace_back(line);
    }
    largest = std::max(largest, ms.begin()->second->bin);
  }
  if (best.empty()) throw std::invalid_argument("no records");
  std::sort(best.begin(), best.end());
  std::sort(greedy.begin(), greedy.end());
  t.median_best_exact = quantile(best, 0.5);
  t.median_greedy = quantile(greedy, 0.5);
  t.median_holds = t.median_best_exact <= t.median_greedy;

  t.largest_bin = kDestinationBins[largest].name;
  double rh = 0.0, ma = 0.0;
  int n = 0;
  for (const auto& [id, ms] : by) {
    if (ms.begin()->second->bin != largest) continue;
    rh += ms.at(Method::RH)->gap.value_or(1.0);
    ma += ms.at(Method::MA)->gap.value_or(1.0);
    ++n;
  }
  t.mean_gap_rh = rh / n;
  t.mean_gap_ma = ma / n;
  t.gap_holds = t.mean_gap_rh <= t.mean_gap_ma;
  return t;
}

namespace {

std::string num(std::optional<double> v) {
  if (!v) return "";
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

void write_records_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
  os << "instance_id,method,status,cost,bound,gap,q_destination,s_demand,unmet_kg,work_units,sources,destinations,"
        "storages\n";
  for (const auto& r : records)
    os << r.instance_id << ',' << to_string(r.method) << ',' << to_string(r.status) << ',' << num(r.cost) << ','
       << num(r.bound) << ',' << num(r.gap) << ',' << kDestinationBins[r.bin].name << ','
       << (r.demand_satisfied ? "yes" : "no") << ',' << num(r.unmet_kg) << ',' << num(r.work) << ',' << r.sources
       << ',' << r.destinations << ',' << r.storages << '\n';
}

void write_timings_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
  os << "instance_id,method,runtime_s,hit_wall_clock,note\n";
  for (const auto& r : records)
    os << r.instance_id << ',' << to_string(r.method) << ',' << num(r.runtime) << ','
       << (r.hit_wall_clock ? "yes" : "no") << ',' << csv_field(r.note) << '\n';
}

void write_summary_csv(std::ostream& os, const Summary& summary) {
  os << "group,metric,method,reference,median_delta_pct,mean_delta_pct\n";
  for (const auto& d : summary.deltas)
    os << d.group << ',' << d.metric << ',' << to_string(d.method) << ',' << to_string(d.reference) << ','
       << num(d.median_delta) << ',' << num(d.mean_delta) << '\n';
}

void write_boxplot_csv(std::ostream& os, const Summary& summary) {
  os << "method,group,metric,n,median,mean,q1,q3,lo_whisker,hi_whisker,outliers\n";
  for (const auto& b : summary.boxes) {
    std::string outliers;
    for (double v : b.stats.outliers) outliers += (outliers.empty() ? "" : ";") + num(v);
    os << to_string(b.method) << ',' << b.group << ',' << b.metric << ',' << b.stats.n << ',' << num(b.stats.median)
       << ',' << num(b.stats.mean) << ',' << num(b.stats.q1) << ',' << num(b.stats.q3) << ','
       << num(b.stats.lo_whisker) << ',' << num(b.stats.hi_whisker) << ',' << outliers << '\n';
  }
}

void write_bench_outputs(const std::filesystem::path& dir, const std::vector<BenchRecord>& records) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("records.csv");
    write_records_csv(out, records);
  }
  {
    auto out = open("timings.csv");
    write_timings_csv(out, records);
  }
  const Summary s = summarize(records);
  {
    auto out = open("summary.csv");
    write_summary_csv(out, s);
  }
  auto out = open("boxplot.csv");
  write_boxplot_csv(out, s);
}

}  // namespace prpmi
