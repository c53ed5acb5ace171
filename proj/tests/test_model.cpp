#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "prpmi/heuristics.hpp"
#include "prpmi/model.hpp"
#include "prpmi/oracle.hpp"
#include "prpmi/solver.hpp"
#include "support.hpp"

using namespace prpmi;

namespace {

struct Counts {
  int vars;
  int rows;
};

// Independent enumeration of the full model's variables and rows.
Counts expected_full(int ns, int nd, int slots, int horizon) {
  const int layers = 2 * horizon + 1;
  const int arcs_r = nd * ns + nd + ns * slots;  // R layers
  const int arcs_l = ns * nd + nd + ns * slots;  // L layers
  const int arcs = arcs_r * (horizon + 1) + arcs_l * horizon;
  const int n = nd + slots;

  int vars = 2 * arcs;
  vars += nd * horizon * 6;             // zL, min selector, keep product, zR, min selector, unmet flag
  vars += ns * horizon * (1 + n * n);   // refill and pairing binaries

  int rows = 2 * arcs_r + 1;            // initial y and f, storage count
  rows += arcs;                         // coupling
  rows += layers * nd;                  // presence
  rows += nd * horizon * (1 + 4 + 1 + 1 + 3 + 1 + 1 + 4 + 1);
  rows += ns * horizon * (3 + 2 * n + n * n + (slots - 1) + 2 * slots);
  return {vars, rows};
}

Instance with_storages(int ns, int nd, int slots, int horizon, int seed) {
  SmallInstanceSpec sp;
  sp.sources = ns;
  sp.destinations = nd;
  sp.slot_limit = slots;
  sp.horizon = horizon;
  sp.seed = seed;
  sp.storages_at_source.assign(ns, 1);
  return make_small_instance(sp);
}

Instance zero_demand(Instance inst) {
  for (auto& d : inst.destinations)
    for (auto& day : d.hourly_demand) day.fill(0.0);
  return inst;
}

SolveLimits quick() {
  SolveLimits l;
  l.wall_clock = 60;
  return l;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("variable and row counts") {
  for (auto [ns, nd, slots, horizon] : {std::array{1, 2, 2, 2}, std::array{2, 2, 2, 3}, std::array{1, 3, 3, 1},
                                        std::array{2, 1, 1, 2}}) {
    const Instance inst = with_storages(ns, nd, slots, horizon, 5);
    const TimeExpandedGraph teg(inst);
    const auto full = build_full_model(inst, teg);
    const Counts want = expected_full(ns, nd, slots, horizon);
    CHECK(full.milp.variable_count() == want.vars);
    CHECK(full.milp.constraint_count() == want.rows);

    const int n = nd + slots;
    const auto relaxed = build_relaxed_model(inst, teg);
    CHECK(relaxed.milp.variable_count() == want.vars - ns * horizon * n * n);
    CHECK(relaxed.milp.constraint_count() == want.rows - ns * horizon * (2 * n + n * n));
  }
  const Counts fig = expected_full(1, 2, 2, 2);
  CHECK(fig.vars == 118);
  CHECK(fig.rows == 185);
}

TEST_CASE("binaries have unit bounds") {
  const Instance inst = test::tiny_instance(1);
  const TimeExpandedGraph teg(inst);
  const auto full = build_full_model(inst, teg);
  for (const auto& v : full.milp.variables())
    if (v.type == VarType::Binary) {
      CHECK(v.lower == 0.0);
      CHECK(v.upper == 1.0);
    }
  for (const auto& row : full.milp.constraints())
    for (std::size_t i = 1; i < row.terms.size(); ++i) CHECK(row.terms[i - 1].var < row.terms[i].var);
}

TEST_CASE("big-M never exceeds capacity") {
  const Instance inst = test::tiny_instance(2);
  const TimeExpandedGraph teg(inst);
  const auto full = build_full_model(inst, teg);
  for (const auto& row : full.milp.constraints())
    for (const auto& t : row.terms) CHECK(std::abs(t.coef) <= inst.storage_capacity + 1e-9);
}

TEST_CASE("zero demand costs nothing") {
  const Instance inst = zero_demand(test::tiny_instance(0));
  const TimeExpandedGraph teg(inst);
  const auto full = build_full_model(inst, teg);
  const auto out = solve_reference(full.milp, quick());
  REQUIRE(out.status == SolveStatus::Optimal);
  CHECK(*out.value == doctest::Approx(0.0).epsilon(1e-9));
  const FlowSolution sol = extract_solution(inst, teg, full, out.x);
  CHECK(sol.y == test::park_flow(inst, teg));
}

TEST_CASE("empty horizon") {
  SmallInstanceSpec sp;
  sp.horizon = 0;
  sp.storages_at_source = {1};
  const Instance inst = make_small_instance(sp);
  const TimeExpandedGraph teg(inst);
  const auto full = build_full_model(inst, teg);
  const auto out = solve_reference(full.milp, quick());
  REQUIRE(out.status == SolveStatus::Optimal);
  CHECK(*out.value == 0.0);
}

TEST_CASE("late resupply leaves the morning peak unmet") {
  SmallInstanceSpec sp;
  sp.sources = 1;
  sp.destinations = 1;
  sp.horizon = 1;
  sp.storages_at_source = {1};
  Instance inst = make_small_instance(sp);
  inst.destinations[0].hourly_demand[0] = demand_profile(260.0);
  inst.transport.travel_time[0][0] = 14;  // swap completes at 23h
  REQUIRE(validate_instance(inst).empty());
  const TimeExpandedGraph teg(inst);

  const OracleResult oracle = brute_force_oracle(inst, teg);
  REQUIRE(oracle.feasible);
  const double unmet = 260.0 - 200.0;
  CHECK(oracle.value >= inst.cost.variable_dissatisfaction * unmet + inst.cost.fixed_dissatisfaction - 1e-6);
  CHECK(total_unmet_demand(inst, oracle.solution) >= unmet - 1e-6);

  const auto full = build_full_model(inst, teg);
  const auto out = solve_reference(full.milp, quick());
  REQUIRE(out.status == SolveStatus::Optimal);
  CHECK(*out.value == doctest::Approx(oracle.value));
}

TEST_CASE("relaxation never exceeds the full optimum") {
  for (int seed = 0; seed < 6; ++seed) {
    const Instance inst = test::tiny_instance(seed);
    const TimeExpandedGraph teg(inst);
    const auto full = solve_reference(build_full_model(inst, teg).milp, quick());
    const auto relaxed = solve_reference(build_relaxed_model(inst, teg).milp, quick());
    REQUIRE(full.status == SolveStatus::Optimal);
    REQUIRE(relaxed.status == SolveStatus::Optimal);
    CHECK(*relaxed.value <= *full.value + 1e-6);
  }
}

TEST_CASE("single storage per source makes the relaxation exact") {
  for (int seed = 0; seed < 4; ++seed) {
    const Instance inst = test::single_storage_instance(seed);
    const TimeExpandedGraph teg(inst);
    const auto full = solve_reference(build_full_model(inst, teg).milp, quick());
    const auto relaxed = solve_reference(build_relaxed_model(inst, teg).milp, quick());
    REQUIRE(full.status == SolveStatus::Optimal);
    REQUIRE(relaxed.status == SolveStatus::Optimal);
    CHECK(*relaxed.value == doctest::Approx(*full.value));
  }
}

TEST_CASE("solver value matches the recomputed cost") {
  for (int seed = 0; seed < 6; ++seed) {
    const Instance inst = test::tiny_instance(seed);
    const TimeExpandedGraph teg(inst);
    const auto full = build_full_model(inst, teg);
    const auto out = solve_reference(full.milp, quick());
    REQUIRE(out.has_incumbent());
    const FlowSolution sol = extract_solution(inst, teg, full, out.x);
    CHECK(std::abs(evaluate_cost(inst, teg, sol).total() - *out.value) <= 1e-6);
    for (ArcId a = 0; a < teg.arc_count(); ++a) CHECK(sol.f[a] <= inst.storage_capacity * sol.y[a] + 1e-9);
    for (int t = 0; t < teg.layer_count(); ++t) {
      int count = 0;
      for (ArcId a : teg.arcs_at(TimeIndex(t))) count += sol.y[a];
      CHECK(count == inst.storage_count());
    }
    CHECK(check_routing(inst, teg, sol.y).empty());
    CHECK(full.milp.max_violation(full_model_point(inst, teg, full, sol)) <= 1e-6);
  }
}

TEST_CASE("refill subproblem of a parked routing") {
  const Instance inst = test::tiny_instance(2);
  const TimeExpandedGraph teg(inst);
  const StorageFlow y = test::park_flow(inst, teg);
  const auto sub = build_refill_subproblem(inst, teg, y);
  const auto full = build_full_model(inst, teg);
  CHECK(sub.milp.binary_count() < full.milp.binary_count());

  // Each destination serves from its own stock until it runs dry.
  double expected = 0.0;
  for (int d = 0; d < inst.destination_count(); ++d) {
    double stock = inst.destinations[d].initial_stock;
    for (int j = 1; j <= inst.horizon; ++j) {
      const double first = cumulative_demand(inst, d, j, kNoSwapHour);
      const double second = daily_demand(inst, d, j) - first;
      const double a = std::min(stock, first);
      stock -= a;
      const double b = std::min(stock, second);
      stock -= b;
      const double unmet = daily_demand(inst, d, j) - a - b;
      expected += inst.cost.variable_dissatisfaction * unmet;
      if (unmet > kUnmetTolerance) expected += inst.cost.fixed_dissatisfaction;
    }
  }
  const auto out = solve_reference(sub.milp, quick());
  REQUIRE(out.status == SolveStatus::Optimal);
  CHECK(*out.value == doctest::Approx(expected));
  const FlowSolution sol = extract_solution(inst, teg, sub, out.x);
  CHECK(sol.cost.transport == 0.0);
  CHECK(sol.cost.refill == 0.0);
}

TEST_CASE("refill subproblem rejects broken routings") {
  const Instance inst = test::tiny_instance(0);
  const TimeExpandedGraph teg(inst);
  StorageFlow y = test::park_flow(inst, teg);
  y[teg.dest_self(1, TimeIndex::first_part(1))] = 0;
  CHECK_THROWS_AS(build_refill_subproblem(inst, teg, y), RoutingError);
  const auto v = check_routing(inst, teg, y);
  CHECK(std::any_of(v.begin(), v.end(), [](const RoutingViolation& r) { return r.rule == "destination-presence"; }));

  StorageFlow moved = test::park_flow(inst, teg);
  moved[teg.source_self(0, 0, TimeIndex::initial())] = 0;
  const auto w = check_routing(inst, teg, moved);
  CHECK(std::any_of(w.begin(), w.end(), [](const RoutingViolation& r) { return r.rule == "initial-placement"; }));
}

TEST_CASE("cost terms") {
  SmallInstanceSpec sp;
  sp.sources = 1;
  sp.destinations = 1;
  sp.horizon = 1;
  sp.storages_at_source = {1};
  Instance inst = make_small_instance(sp);
  inst.transport.distance[0][0] = 40.0;
  const TimeExpandedGraph teg(inst);

  FlowSolution parked = simulate_refills(inst, teg, test::park_flow(inst, teg));
  CHECK(evaluate_cost(inst, teg, parked).transport == 0.0);

  GreedyConfig eager;
  eager.critical_threshold = inst.storage_capacity;
  const StorageFlow y = greedy_routing(inst, teg, eager);
  REQUIRE(y[teg.source_to_dest(0, 0, TimeIndex::first_part(1))] == 1);
  const FlowSolution sent = simulate_refills(inst, teg, y);
  CHECK(evaluate_cost(inst, teg, sent).transport == doctest::Approx(180.0));

  FlowSolution shorted = parked;
  REQUIRE(total_unmet_demand(inst, shorted) <= kUnmetTolerance);
  shorted.z_first[0] -= 10.0;
  const CostBreakdown c = evaluate_cost(inst, teg, shorted);
  CHECK(c.variable_dissatisfaction == doctest::Approx(120.0));
  CHECK(c.fixed_dissatisfaction == 1500.0);

  FlowSolution partial = parked;
  partial.refill.clear();
  CHECK_THROWS_AS(evaluate_cost(inst, teg, partial), std::invalid_argument);
}

TEST_CASE("demand split follows the swap hour") {
  const Instance inst = test::tiny_instance(0);
  const TimeExpandedGraph teg(inst);
  const StorageFlow parked = test::park_flow(inst, teg);
  CHECK(swap_hour(inst, teg, parked, 0, 1) == kNoSwapHour);
  CHECK(first_part_demand(inst, teg, parked, 0, 1) == cumulative_demand(inst, 0, 1, kNoSwapHour));

  GreedyConfig eager;
  eager.critical_threshold = inst.storage_capacity;
  const StorageFlow y = greedy_routing(inst, teg, eager);
  for (int s = 0; s < inst.source_count(); ++s)
    if (y[teg.source_to_dest(s, 0, TimeIndex::first_part(1))]) {
      CHECK(swap_hour(inst, teg, y, 0, 1) == inst.transport.swap_hour(s, 0));
      CHECK(first_part_demand(inst, teg, y, 0, 1) ==
            cumulative_demand(inst, 0, 1, inst.transport.swap_hour(s, 0)));
    }
}

TEST_CASE("simulated refills satisfy every row") {
  for (int seed = 0; seed < 6; ++seed) {
    const Instance inst = test::tiny_instance(seed);
    const TimeExpandedGraph teg(inst);
    GreedyConfig eager;
    eager.critical_threshold = 150.0;
    const FlowSolution sol = simulate_refills(inst, teg, greedy_routing(inst, teg, eager));
    const auto full = build_full_model(inst, teg);
    CHECK(full.milp.max_violation(full_model_point(inst, teg, full, sol)) <= 1e-6);
    const auto relaxed = build_relaxed_model(inst, teg);
    CHECK(relaxed.milp.max_violation(model_point(inst, teg, relaxed, sol)) <= 1e-6);
  }
}

}
