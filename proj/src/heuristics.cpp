#include "prpmi/heuristics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace prpmi {

const char* to_string(Method m) {
  switch (m) {
    case Method::MA:
      return "MA";
    case Method::RH:
      return "RH";
    case Method::GH:
      return "GH";
  }
  return "?";
}

std::optional<Method> method_from_string(std::string_view s) {
  std::string t(s);
  for (char& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "ma") return Method::MA;
  if (t == "rh") return Method::RH;
  if (t == "gh") return Method::GH;
  return std::nullopt;
}

std::optional<double> MethodResult::gap() const {
  if (!solution || !bound) return std::nullopt;
  return relative_gap(cost(), *bound);
}

StorageFlow greedy_routing(const Instance& inst, const TimeExpandedGraph& teg, const GreedyConfig& config) {
  const int ns = teg.source_count(), nd = teg.destination_count();
  const double cap = inst.storage_capacity;
  StorageFlow y = initial_flow(inst, teg).y;
  std::vector<double> stock(nd);
  for (int d = 0; d < nd; ++d) stock[d] = inst.destinations[d].initial_stock;

  for (int j = 1; j <= inst.horizon; ++j) {
    const TimeIndex P(2 * j - 2), L = TimeIndex::first_part(j), R = TimeIndex::second_part(j);
    std::vector<int> available(ns, 0);
    for (int s = 0; s < ns; ++s) {
      for (int d = 0; d < nd; ++d) available[s] += y[teg.dest_to_source(d, s, P)];
      for (int k = 0; k < teg.slot_limit(s); ++k) available[s] += y[teg.source_self(s, k, P)];
    }
    std::vector<int> critical;
    for (int d = 0; d < nd; ++d)
      if (stock[d] <= config.critical_threshold) critical.push_back(d);
    std::stable_sort(critical.begin(), critical.end(), [&](int a, int b) { return stock[a] < stock[b]; });

    std::vector<int> served_by(nd, -1);
    for (int d : critical) {
      int best = -1;
      for (int s = 0; s < ns; ++s) {
        if (available[s] < 1) continue;
        if (best < 0 || inst.transport.trip_hours(s, d) < inst.transport.trip_hours(best, d)) best = s;
      }
      if (best < 0) break;
      y[teg.source_to_dest(best, d, L)] = 1;
      y[teg.dest_to_source(d, best, R)] = 1;
      --available[best];
      served_by[d] = best;
    }
    for (int s = 0; s < ns; ++s)
      for (int k = 0; k < available[s]; ++k) {
        y[teg.source_self(s, k, L)] = 1;
        y[teg.source_self(s, k, R)] = 1;
      }
    for (int d = 0; d < nd; ++d) {
      y[teg.dest_self(d, L)] = 1;
      y[teg.dest_self(d, R)] = 1;
      const int hour = served_by[d] >= 0 ? inst.transport.swap_hour(served_by[d], d) : kNoSwapHour;
      const double first = cumulative_demand(inst, d, j, hour);
      const double second = daily_demand(inst, d, j) - first;
      const double left = stock[d] - std::min(stock[d], first);
      const double serving = served_by[d] >= 0 ? cap : left;
      stock[d] = serving - std::min(serving, second);
    }
  }
  return y;
}

SolveLimits scale_limits(const SolveLimits& limits, double share) {
  SolveLimits out = limits;
  out.wall_clock = limits.wall_clock * share;
  if (std::isfinite(limits.work_limit)) out.work_limit = limits.work_limit * share;
  return out;
}

SolveOutcome solve_model(const MilpModel& model, const SolveLimits& limits, const SolverConfig& solver,
                         const std::vector<double>& start) {
  if (!solver.external_command.empty()) return run_external(model, solver.external_command, limits);
  ReferenceOptions opt = solver.reference;
  if (!start.empty()) opt.start = start;
  return solve_reference(model, limits, opt);
}

PhiResult compute_phi(const Instance& inst, const TimeExpandedGraph& teg, const StorageFlow& y,
                      const SolveLimits& limits, const SolverConfig& solver) {
  const BuiltModel sub = build_refill_subproblem(inst, teg, y);
  std::optional<FlowSolution> seed;
  std::vector<double> start;
  if (solver.seed_subproblem) {
    seed = simulate_refills(inst, teg, y);
    start = model_point(inst, teg, sub, *seed);
  }
  PhiResult res;
  res.outcome = solve_model(sub.milp, limits, solver, start);
  if (res.outcome.has_incumbent())
    res.solution = extract_solution(inst, teg, sub, res.outcome.x);
  else if (seed)
    res.solution = std::move(seed);
  return res;
}

namespace {

double elapsed(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

SolveStatus heuristic_status(const MethodResult& r, double gap_tolerance) {
  if (!r.solution) return SolveStatus::NoIncumbent;
  if (auto g = r.gap(); g && *g <= gap_tolerance) return SolveStatus::Optimal;
  return r.hit_limit ? SolveStatus::FeasibleTimeLimit : SolveStatus::Feasible;
}

bool stopped_early(const SolveOutcome& o) {
  return o.status == SolveStatus::FeasibleTimeLimit || o.status == SolveStatus::NoIncumbent || o.hit_wall_clock;
}

}  // namespace

MethodResult greedy_method(const Instance& inst, const TimeExpandedGraph& teg, const SolveLimits& limits,
                           const GreedyConfig& config, const SolverConfig& solver) {
  const auto start = std::chrono::steady_clock::now();
  MethodResult r;
  r.method = Method::GH;
  const StorageFlow y = greedy_routing(inst, teg, config);
  PhiResult phi = compute_phi(inst, teg, y, scale_limits(limits, solver.phi_share), solver);
  r.solution = std::move(phi.solution);
  r.work = phi.outcome.work;
  r.hit_wall_clock = phi.outcome.hit_wall_clock;
  r.hit_limit = stopped_early(phi.outcome);
  if (!phi.optimal()) r.note = std::string("refill subproblem ") + to_string(phi.outcome.status);
  r.status = r.solution ? (r.hit_limit ? SolveStatus::FeasibleTimeLimit : SolveStatus::Feasible)
                        : SolveStatus::NoIncumbent;
  r.seconds = elapsed(start);
  return r;
}

MethodResult two_step_heuristic(const Instance& inst, const TimeExpandedGraph& teg, const SolveLimits& limits,
                                const GreedyConfig& config, const SolverConfig& solver) {
  const auto start = std::chrono::steady_clock::now();
  MethodResult r;
  r.method = Method::RH;
  const BuiltModel relaxed = build_relaxed_model(inst, teg);
  std::vector<double> seed;
  if (solver.seed_relaxed)
    seed = model_point(inst, teg, relaxed, simulate_refills(inst, teg, greedy_routing(inst, teg, config)));
  const SolveOutcome step1 = solve_model(relaxed.milp, scale_limits(limits, 1.0 - solver.phi_share), solver, seed);
  r.work = step1.work;
  r.hit_wall_clock = step1.hit_wall_clock;
  r.hit_limit = stopped_early(step1);
  if (step1.status == SolveStatus::Error) {
    r.status = SolveStatus::Error;
    r.note = "relaxed model: " + step1.diagnostic;
    r.seconds = elapsed(start);
    return r;
  }
  if (std::isfinite(step1.bound)) r.bound = step1.bound;
  StorageFlow y;
  if (step1.has_incumbent()) {
    y = extract_solution(inst, teg, relaxed, step1.x).y;
  } else {
    y = greedy_routing(inst, teg, config);
    r.fallback = true;
    r.note = std::string("relaxed model ") + to_string(step1.status) + ", routing from GH";
  }
  PhiResult phi = compute_phi(inst, teg, y, scale_limits(limits, solver.phi_share), solver);
  r.solution = std::move(phi.solution);
  r.work += phi.outcome.work;
  if (!phi.optimal()) r.note += (r.note.empty() ? "" : "; ") + std::string("refill subproblem ") + to_string(phi.outcome.status);
  r.hit_wall_clock = r.hit_wall_clock || phi.outcome.hit_wall_clock;
  r.hit_limit = r.hit_limit || stopped_early(phi.outcome);
  if (r.solution && r.bound) r.bound = std::min(*r.bound, r.cost());
  r.status = heuristic_status(r, limits.gap_tolerance);
  r.seconds = elapsed(start);
  return r;
}

MethodResult full_milp_method(const Instance& inst, const TimeExpandedGraph& teg, const SolveLimits& limits,
                              const SolverConfig& solver, const GreedyConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  MethodResult r;
  r.method = Method::MA;
  const BuiltModel full = build_full_model(inst, teg);
  std::vector<double> seed;
  if (solver.seed_full)
    seed = model_point(inst, teg, full, simulate_refills(inst, teg, greedy_routing(inst, teg, config)));
  const SolveOutcome out = solve_model(full.milp, limits, solver, seed);
  r.work = out.work;
  r.hit_wall_clock = out.hit_wall_clock;
  r.hit_limit = stopped_early(out);
  r.status = out.status;
  r.note = out.diagnostic;
  if (std::isfinite(out.bound)) r.bound = out.bound;
  if (out.has_incumbent()) {
    r.solution = extract_solution(inst, teg, full, out.x);
    if (r.bound) r.bound = std::min(*r.bound, r.cost());
  }
  r.seconds = elapsed(start);
  return r;
}

MethodResult run_method(Method m, const Instance& inst, const TimeExpandedGraph& teg, const SolveLimits& limits,
                        const GreedyConfig& config, const SolverConfig& solver) {
  const auto problems = validate_instance(inst);
  if (!problems.empty()) throw ValidationError(problems);
  switch (m) {
    case Method::MA:
      return full_milp_method(inst, teg, limits, solver, config);
    case Method::RH:
      return two_step_heuristic(inst, teg, limits, config, solver);
    case Method::GH:
      return greedy_method(inst, teg, limits, config, solver);
  }
  throw std::invalid_argument("unknown method");
}

}  // namespace prpmi
