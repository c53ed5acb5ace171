#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "prpmi/lp.hpp"
#include "prpmi/milp.hpp"

namespace prpmi {

struct SolveLimits {
  double wall_clock = 1200.0;  // seconds
  double gap_tolerance = 1e-6;
  std::optional<long> node_limit;
  // Deterministic effort cap in work units; the wall clock stays a safety net.
  double work_limit = kInfinity;
};

// Feasible: a heuristic answer without an optimality proof and without
// hitting a limit.
enum class SolveStatus : unsigned char { Optimal, Feasible, FeasibleTimeLimit, NoIncumbent, Infeasible, Unbounded, Error };

const char* to_string(SolveStatus s);

struct ProgressPoint {
  long node = 0;
  double bound = -kInfinity;
  double incumbent = kInfinity;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::Error;
  std::optional<double> value;
  std::vector<double> x;
  double bound = -kInfinity;
  long nodes = 0;
  long lp_iterations = 0;
  double work = 0.0;
  bool hit_wall_clock = false;
  double seconds = 0.0;
  std::string diagnostic;
  std::vector<ProgressPoint> trace;

  bool has_incumbent() const { return value.has_value(); }
  // (UB - LB) / UB clipped to [0, 1]; empty without an incumbent.
  std::optional<double> gap() const;
};

double relative_gap(double upper, double lower);

enum class LpEngine : unsigned char { Dual, Dense };

struct ReferenceOptions {
  LpEngine engine = LpEngine::Dual;
  bool parallel_kernels = true;
  // Complete assignment tried as the first incumbent when feasible.
  std::vector<double> start;
  bool record_trace = false;
};

// Branch and bound with LP relaxations. Depth-first dives with best-bound
// restarts, most-fractional branching, ties to the lowest variable index.
SolveOutcome solve_reference(const MilpModel& model, const SolveLimits& limits, const ReferenceOptions& options = {});

// Rounds binaries, checks rows and bounds; returns the worst violation.
double incumbent_violation(const MilpModel& model, std::vector<double>& x);

// CPLEX LP text. The objective constant is written as the coefficient of a
// variable named obj_const (suffixed with _ when taken) fixed to 1.
void export_lp(const MilpModel& model, const std::filesystem::path& path);
std::string to_lp_string(const MilpModel& model);
// Reads the subset written by export_lp: Minimize/Maximize, Subject To,
// Bounds, Binaries, End. Throws std::runtime_error with the line number.
MilpModel read_lp(const std::filesystem::path& path);
MilpModel parse_lp(const std::string& text);

// Parses a solution file: XML-like <variable name=".." value=".."/> entries or
// plain "name value" lines. Lines starting with '#' are comments; a line
// "status <word>" sets the reported status.
struct ParsedSolution {
  std::string status;  // empty when the file has none
  std::vector<std::pair<std::string, double>> values;
};
ParsedSolution parse_solution(const std::string& text);

// Runs argv = [command, lp, "--time-limit", seconds, "--sol", sol] and reads
// the solution back. Scratch files live in work_dir (a temp dir when empty).
SolveOutcome run_external(const MilpModel& model, const std::string& command, const SolveLimits& limits,
                          const std::filesystem::path& work_dir = {});

}  // namespace prpmi
