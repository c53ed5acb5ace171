#pragma once

#include <optional>
#include <string>

#include "prpmi/instance.hpp"
#include "prpmi/model.hpp"
#include "prpmi/solver.hpp"
#include "prpmi/teg.hpp"

namespace prpmi {

struct GreedyConfig {
  double critical_threshold = 100.0;  // kg
};

// Day-by-day dispatch: destinations whose stock at the start of the day is at
// or below the threshold get a full storage from the closest source that has
// one, in ascending stock order; the replaced storage returns to that source.
StorageFlow greedy_routing(const Instance& inst, const TimeExpandedGraph& teg, const GreedyConfig& config = {});

// How models are solved: the reference branch and bound, or an external
// executable fed through an LP file when external_command is set.
struct SolverConfig {
  std::string external_command;
  ReferenceOptions reference;
  // Seed the refill subproblem with the simulated-refill solution.
  bool seed_subproblem = true;
  // Start the relaxed model of RH from the GH routing.
  bool seed_relaxed = true;
  // Start the full model of MA from the GH routing.
  bool seed_full = false;
  // Share of a method's limits given to the refill subproblem in RH and GH.
  double phi_share = 0.2;
};

SolveLimits scale_limits(const SolveLimits& limits, double share);

SolveOutcome solve_model(const MilpModel& model, const SolveLimits& limits, const SolverConfig& solver,
                         const std::vector<double>& start = {});

struct PhiResult {
  SolveOutcome outcome;
  std::optional<FlowSolution> solution;  // gamma(y)
  double value() const { return solution ? solution->cost.total() : kInfinity; }
  bool optimal() const { return outcome.status == SolveStatus::Optimal; }
};

// Optimal refills for a fixed routing. Throws RoutingError when y breaks the
// routing rules.
PhiResult compute_phi(const Instance& inst, const TimeExpandedGraph& teg, const StorageFlow& y,
                      const SolveLimits& limits = {}, const SolverConfig& solver = {});

enum class Method : unsigned char { MA, RH, GH };

const char* to_string(Method m);
std::optional<Method> method_from_string(std::string_view s);

struct MethodResult {
  Method method = Method::GH;
  SolveStatus status = SolveStatus::Error;
  std::optional<FlowSolution> solution;
  std::optional<double> bound;
  double seconds = 0.0;
  double work = 0.0;
  bool hit_wall_clock = false;
  bool hit_limit = false;  // some solve stopped at a wall-clock, work or node limit
  bool fallback = false;  // RH routing taken from GH
  std::string note;

  bool has_solution() const { return solution.has_value(); }
  double cost() const { return solution ? solution->cost.total() : kInfinity; }
  // (cost - bound) / cost in [0, 1], when both exist.
  std::optional<double> gap() const;
};

MethodResult greedy_method(const Instance& inst, const TimeExpandedGraph& teg, const SolveLimits& limits,
                           const GreedyConfig& config = {}, const SolverConfig& solver = {});
MethodResult two_step_heuristic(const Instance& inst, const TimeExpandedGraph& teg, const SolveLimits& limits,
                                const GreedyConfig& config = {}, const SolverConfig& solver = {});
MethodResult full_milp_method(const Instance& inst, const TimeExpandedGraph& teg, const SolveLimits& limits,
                              const SolverConfig& solver = {}, const GreedyConfig& config = {});

MethodResult run_method(Method m, const Instance& inst, const TimeExpandedGraph& teg, const SolveLimits& limits,
                        const GreedyConfig& config = {}, const SolverConfig& solver = {});

}  // namespace prpmi
