#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "prpmi/heuristics.hpp"
#include "prpmi/instance.hpp"
#include "prpmi/stats.hpp"

namespace prpmi {

struct DestinationBin {
  const char* name;
  int low;
  int high;
};

inline constexpr DestinationBin kDestinationBins[4] = {{"Q1", 10, 18}, {"Q2", 19, 27}, {"Q3", 28, 35}, {"Q4", 36, 48}};

// Bin index 0..3 of a destination count, or -1 outside every bin.
int destination_bin(int destinations);

struct SuiteInstance {
  std::string id;
  int bin = 0;
  GenerationSpec spec;
  Instance instance;
};

// count / 4 instances per bin (the remainder goes to the lowest bins). The
// destination count is uniform in the bin, the source count uniform among
// those compatible with it, and the demand magnitude and dissatisfaction
// profile alternate. Throws std::invalid_argument when count < 4.
std::vector<SuiteInstance> build_suite(std::uint64_t seed, int count, int horizon = 7);

// Work units charged per second of the nominal time limit when a suite runs
// under deterministic limits.
inline constexpr double kWorkUnitsPerSecond = 2.5e8;

struct BenchOptions {
  std::vector<Method> methods{Method::MA, Method::RH, Method::GH};
  double limit_seconds = 60.0;
  // Effort caps instead of wall-clock caps; the clock stays as a safety net
  // at safety_factor times the limit.
  bool deterministic = true;
  double safety_factor = 4.0;
  int workers = 1;
  GreedyConfig greedy;
  SolverConfig solver;
};

SolveLimits bench_limits(const BenchOptions& options);

struct BenchRecord {
  std::string instance_id;
  Method method = Method::GH;
  SolveStatus status = SolveStatus::Error;
  std::optional<double> cost;
  std::optional<double> bound;
  // MA and RH only; 1 when no incumbent was found.
  std::optional<double> gap;
  double runtime = 0.0;  // seconds, not part of records.csv
  double work = 0.0;
  bool hit_wall_clock = false;
  int bin = 0;
  bool demand_satisfied = false;  // best solution of the instance meets all demand
  std::optional<double> unmet_kg;
  int sources = 0;
  int destinations = 0;
  int storages = 0;
  std::string note;
};

// One record per (instance, method), sorted by instance id then method.
// Solver failures become Error records.
std::vector<BenchRecord> run_suite(const std::vector<SuiteInstance>& suite, const BenchOptions& options);

struct GroupStats {
  std::string group;  // all, Q1..Q4, S_demand=yes, S_demand=no
  std::string metric; // cost or gap
  Method method = Method::GH;
  BoxStats stats;
};

struct MethodDelta {
  std::string group;
  std::string metric;
  Method method = Method::GH;
  Method reference = Method::GH;
  double median_delta = 0.0;  // percent
  double mean_delta = 0.0;
};

struct Summary {
  std::vector<GroupStats> boxes;
  std::vector<MethodDelta> deltas;
};

// Throws std::invalid_argument on empty input.
Summary summarize(const std::vector<BenchRecord>& records);

struct TrendCheck {
  double median_best_exact = 0.0;  // median over instances of min(MA, RH)
  double median_greedy = 0.0;
  std::string largest_bin;
  double mean_gap_rh = 0.0;
  double mean_gap_ma = 0.0;
  bool median_holds = false;
  bool gap_holds = false;
  std::vector<std::string> log;  // instances where min(MA, RH) > GH
};

// Needs MA, RH and GH records on every instance; throws std::invalid_argument otherwise.
TrendCheck trend_check(const std::vector<BenchRecord>& records);

void write_records_csv(std::ostream& os, const std::vector<BenchRecord>& records);
void write_timings_csv(std::ostream& os, const std::vector<BenchRecord>& records);
void write_summary_csv(std::ostream& os, const Summary& summary);
void write_boxplot_csv(std::ostream& os, const Summary& summary);

// records.csv, timings.csv, summary.csv and boxplot.csv in dir.
void write_bench_outputs(const std::filesystem::path& dir, const std::vector<BenchRecord>& records);

}  // namespace prpmi
