#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "prpmi/instance.hpp"
#include "prpmi/linearize.hpp"
#include "prpmi/milp.hpp"
#include "prpmi/teg.hpp"

namespace prpmi {

// Bumped whenever variable or row naming of the built models changes.
inline constexpr int kModelSchemaVersion = 1;

// Storage flow: y value of every arc of the graph.
using StorageFlow = std::vector<std::uint8_t>;

enum class ModelVariant : unsigned char { Full, Relaxed, RefillSubproblem };

const char* to_string(ModelVariant v);

// A model quantity that is either a decision variable or a fixed number.
struct Slot {
  VarId var = -1;
  double value = 0.0;

  LinExpr expr() const { return var >= 0 ? LinExpr::var(var) : LinExpr(value); }
  double eval(std::span<const double> x) const { return var >= 0 ? x[var] : value; }
};

struct ModelLayout {
  std::vector<Slot> y;  // per arc
  std::vector<Slot> f;  // per arc
  // Indexed [d * J + (j - 1)].
  std::vector<Slot> z_first;
  std::vector<Slot> z_second;
  std::vector<LinExpr> kept_stock;  // stock left at d when no delivery arrives
  std::vector<VarId> min_first;
  std::vector<VarId> min_second;
  std::vector<VarId> unmet;
  // Indexed [s * J + (j - 1)].
  std::vector<VarId> refill;
  std::vector<AssignmentVars> assignment;
};

struct BuiltModel {
  ModelVariant variant = ModelVariant::Full;
  MilpModel milp;
  ModelLayout layout;
};

BuiltModel build_full_model(const Instance& inst, const TimeExpandedGraph& teg);
BuiltModel build_relaxed_model(const Instance& inst, const TimeExpandedGraph& teg);
// Throws RoutingError when y breaks one of the routing constraints.
BuiltModel build_refill_subproblem(const Instance& inst, const TimeExpandedGraph& teg, const StorageFlow& y);

// y and f on every arc leaving R0, fixed by the instance.
struct InitialFlow {
  StorageFlow y;
  std::vector<double> f;
};
InitialFlow initial_flow(const Instance& inst, const TimeExpandedGraph& teg);

// Arc positions of the assignment vectors at source s on day j: entries below
// |D| are destination arcs, the rest slot arcs.
std::vector<ArcId> assignment_inflow_arcs(const TimeExpandedGraph& teg, int s, int day);
std::vector<ArcId> assignment_outflow_arcs(const TimeExpandedGraph& teg, int s, int day);

struct RoutingViolation {
  std::string rule;
  std::string detail;
};

class RoutingError : public std::runtime_error {
 public:
  explicit RoutingError(std::vector<RoutingViolation> violations);
  const std::vector<RoutingViolation>& violations() const { return violations_; }

 private:
  std::vector<RoutingViolation> violations_;
};

// Checks the storage-only constraints of the model. Rule names:
// initial-placement, destination-presence, single-delivery, swap-return,
// source-capacity, source-conservation, slot-order, afternoon-carry, binary.
std::vector<RoutingViolation> check_routing(const Instance& inst, const TimeExpandedGraph& teg, const StorageFlow& y);

struct CostBreakdown {
  double transport = 0.0;
  double refill = 0.0;
  double variable_dissatisfaction = 0.0;
  double fixed_dissatisfaction = 0.0;
  double total() const { return transport + refill + variable_dissatisfaction + fixed_dissatisfaction; }
};

inline constexpr double kUnmetTolerance = 1e-6;

struct FlowSolution {
  StorageFlow y;           // per arc
  std::vector<double> f;   // per arc
  // Indexed [d * J + (j - 1)].
  std::vector<double> z_first;
  std::vector<double> z_second;
  std::vector<std::uint8_t> unmet_flag;
  // Indexed [s * J + (j - 1)].
  std::vector<double> refill;
  // sigma[n] = m pairs inflow n with outflow m at (s, Lj); -1 for idle entries.
  // Empty vectors mean no pairing was recorded.
  std::vector<std::vector<int>> sigma;
  CostBreakdown cost;
};

FlowSolution extract_solution(const Instance& inst, const TimeExpandedGraph& teg, const BuiltModel& model,
                              std::span<const double> x);

// Hour at which destination d swaps on day j, or kNoSwapHour without delivery.
int swap_hour(const Instance& inst, const TimeExpandedGraph& teg, const StorageFlow& y, int d, int day);
// Demand the first part of day j must serve at d under routing y.
double first_part_demand(const Instance& inst, const TimeExpandedGraph& teg, const StorageFlow& y, int d, int day);
double unmet_demand(const Instance& inst, const FlowSolution& sol, int d, int day);
double total_unmet_demand(const Instance& inst, const FlowSolution& sol);

// Recomputes the four cost terms from y, z, r and the demand data.
CostBreakdown evaluate_cost(const Instance& inst, const TimeExpandedGraph& teg, const FlowSolution& sol);

// Point of any model variant built from a solution, for row-by-row checks or
// as a starting incumbent. Models with pairing rows need recorded pairings.
std::vector<double> model_point(const Instance& inst, const TimeExpandedGraph& teg, const BuiltModel& built,
                                const FlowSolution& sol);
std::vector<double> full_model_point(const Instance& inst, const TimeExpandedGraph& teg, const BuiltModel& full,
                                     const FlowSolution& sol);

// Simulates refills for a fixed routing: each departing storage is paired with
// the fullest unpaired arrival and topped up within the daily refill budget.
// Returns a complete solution that satisfies every model constraint.
FlowSolution simulate_refills(const Instance& inst, const TimeExpandedGraph& teg, const StorageFlow& y);

}  // namespace prpmi
