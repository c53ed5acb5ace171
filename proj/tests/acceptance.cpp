// Acceptance checks, one per criterion. Usage: acceptance_tests [criterion...]
// Each criterion prints a single PASS or FAIL line; the exit code is nonzero
// when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "prpmi/bench.hpp"
#include "prpmi/heuristics.hpp"
#include "prpmi/linearize.hpp"
#include "prpmi/oracle.hpp"
#include "prpmi/planning.hpp"
#include "support.hpp"

using namespace prpmi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    if (failures.size() < 10) failures.push_back(what);
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

SolveLimits seconds(double s) {
  SolveLimits l;
  l.wall_clock = s;
  return l;
}

std::vector<Instance> tiny_set() {
  std::vector<Instance> out;
  for (int seed = 0; seed < 12; ++seed) out.push_back(test::tiny_instance(seed));
  return out;
}

Instance medium_instance(int seed) {
  SmallInstanceSpec sp;
  sp.sources = 2;
  sp.destinations = 3 + seed % 2;
  sp.storages_at_source = {1, 1};
  sp.slot_limit = 3;
  sp.horizon = 3 + seed % 3;
  sp.seed = 1000 + static_cast<std::uint64_t>(seed);
  return make_small_instance(sp);
}

Outcome oracle_equivalence() {
  Outcome o;
  const auto set = tiny_set();
  double worst = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Instance& inst = set[i];
    const TimeExpandedGraph teg(inst);
    const auto exact = brute_force_oracle(inst, teg);
    const auto full = solve_reference(build_full_model(inst, teg).milp, seconds(60));
    const std::string tag = "tiny " + std::to_string(i);
    o.expect(exact.feasible, tag + ": oracle found nothing");
    o.expect(full.status == SolveStatus::Optimal, tag + ": solver status " + to_string(full.status));
    if (!exact.feasible || !full.value) continue;
    const double diff = std::abs(*full.value - exact.value);
    worst = std::max(worst, diff);
    o.expect(diff <= 1e-6, tag + ": solver " + fmt(*full.value) + " vs oracle " + fmt(exact.value));
  }
  o.detail = std::to_string(set.size()) + " instances, worst difference " + fmt(worst);
  return o;
}

Outcome relaxation_bound() {
  Outcome o;
  int checked = 0;
  for (const Instance& inst : tiny_set()) {
    const TimeExpandedGraph teg(inst);
    const auto relaxed = solve_reference(build_relaxed_model(inst, teg).milp, seconds(60));
    const auto full = solve_reference(build_full_model(inst, teg).milp, seconds(60));
    o.expect(relaxed.status == SolveStatus::Optimal && full.has_incumbent(), "tiny solve failed");
    if (relaxed.value && full.value) o.expect(*relaxed.value <= *full.value + 1e-6, "tiny: relaxed above full");
    ++checked;
  }
  const SolveLimits limits = seconds(2);
  for (int seed = 0; seed < 20; ++seed) {
    const Instance inst = medium_instance(seed);
    const TimeExpandedGraph teg(inst);
    const auto relaxed = solve_model(build_relaxed_model(inst, teg).milp, limits, {});
    double incumbent = kInfinity;
    for (Method m : {Method::MA, Method::RH, Method::GH}) {
      const auto r = run_method(m, inst, teg, limits);
      if (r.solution) incumbent = std::min(incumbent, r.cost());
    }
    const std::string tag = "medium " + std::to_string(seed);
    o.expect(std::isfinite(incumbent), tag + ": no incumbent");
    o.expect(relaxed.bound <= incumbent + 1e-6, tag + ": bound " + fmt(relaxed.bound) + " above " + fmt(incumbent));
    ++checked;
  }
  o.detail = std::to_string(checked) + " instances";
  return o;
}

bool feasible(const MilpModel& m, const std::vector<double>& x) { return m.max_violation(x) <= 1e-9; }

Outcome linearization_kernels() {
  Outcome o;
  long points = 0;
  const double big_m = 300.0;
  const std::vector<double> grid{0.0, 75.0, 150.0, 225.0, 300.0};
  {
    MilpModel m;
    const VarId x = m.add_continuous("x", 0, big_m), b = m.add_binary("b");
    linearize_implication(m, "imp", LinExpr::var(x), LinExpr::var(b), big_m);
    for (double xv : grid)
      for (double bv : {0.0, 1.0}) {
        std::vector<double> pt(2);
        pt[x] = xv;
        pt[b] = bv;
        o.expect(feasible(m, pt) == (xv <= 0.0 || bv == 1.0), "implication at x=" + fmt(xv));
        ++points;
      }
  }
  {
    MilpModel m;
    const VarId x = m.add_continuous("x", 0, big_m), b = m.add_binary("b");
    const VarId p = linearize_product(m, "p", LinExpr::var(b), LinExpr::var(x), big_m);
    for (double bv : {0.0, 1.0})
      for (double xv : grid)
        for (double pv : grid) {
          std::vector<double> pt(3);
          pt[b] = bv;
          pt[x] = xv;
          pt[p] = pv;
          o.expect(feasible(m, pt) == (pv == bv * xv), "product at b=" + fmt(bv) + " x=" + fmt(xv));
          ++points;
        }
  }
  {
    MilpModel m;
    const VarId z = m.add_continuous("z", 0, big_m), x1 = m.add_continuous("x1", 0, big_m),
                x2 = m.add_continuous("x2", 0, big_m);
    const VarId b = linearize_min(m, "mn", LinExpr::var(z), LinExpr::var(x1), LinExpr::var(x2), big_m);
    for (double zv : grid)
      for (double a : grid)
        for (double c : grid) {
          bool any = false;
          for (double bv : {0.0, 1.0}) {
            std::vector<double> pt(4);
            pt[z] = zv;
            pt[x1] = a;
            pt[x2] = c;
            pt[b] = bv;
            any = any || feasible(m, pt);
            ++points;
          }
          o.expect(any == (zv == std::min(a, c)), "min at z=" + fmt(zv) + " x1=" + fmt(a) + " x2=" + fmt(c));
        }
  }
  for (int n : {2, 3}) {
    MilpModel m;
    std::vector<VarId> fi, fo, yi, yo;
    std::vector<LinExpr> efi, efo, eyi, eyo;
    for (int i = 0; i < n; ++i) {
      fi.push_back(m.add_continuous("fi" + std::to_string(i), 0, big_m));
      fo.push_back(m.add_continuous("fo" + std::to_string(i), 0, big_m));
      yi.push_back(m.add_binary("yi" + std::to_string(i)));
      yo.push_back(m.add_binary("yo" + std::to_string(i)));
      efi.push_back(LinExpr::var(fi.back()));
      efo.push_back(LinExpr::var(fo.back()));
      eyi.push_back(LinExpr::var(yi.back()));
      eyo.push_back(LinExpr::var(yo.back()));
    }
    const AssignmentVars vars = linearize_assignment(m, "pair", efi, efo, eyi, eyo, big_m);
    const std::vector<double> levels = n == 2 ? std::vector<double>{0.0, 150.0, 300.0} : std::vector<double>{0.0, 300.0};
    const int nl = static_cast<int>(levels.size());
    int combos = 1;
    for (int i = 0; i < 2 * n; ++i) combos *= nl;
    std::vector<double> x(m.variable_count(), 0.0);
    for (unsigned ym = 0; ym < (1u << (2 * n)); ++ym)
      for (int g = 0; g < combos; ++g) {
        int code = g;
        for (int i = 0; i < n; ++i) {
          x[yi[i]] = (ym >> i) & 1u;
          x[yo[i]] = (ym >> (n + i)) & 1u;
          x[fi[i]] = levels[code % nl];
          code /= nl;
          x[fo[i]] = levels[code % nl];
          code /= nl;
        }
        for (unsigned beta = 0; beta < (1u << (n * n)); ++beta) {
          for (int k = 0; k < n * n; ++k) x[vars.beta[k]] = (beta >> k) & 1u;
          bool defined = true;
          for (int i = 0; i < n && defined; ++i) {
            int row = 0, col = 0;
            for (int k = 0; k < n; ++k) {
              row += (beta >> (i * n + k)) & 1u;
              col += (beta >> (k * n + i)) & 1u;
              if (((beta >> (i * n + k)) & 1u) && x[fi[i]] > x[fo[k]]) defined = false;
            }
            if (row != x[yi[i]] || col != x[yo[i]]) defined = false;
          }
          o.expect(feasible(m, x) == defined, "assignment n=" + std::to_string(n) + " beta=" + std::to_string(beta));
          ++points;
        }
      }
  }
  o.detail = std::to_string(points) + " grid points";
  return o;
}

void check_decoding(Outcome& o, const Instance& inst, const TimeExpandedGraph& teg, const FlowSolution& sol,
                    const std::string& tag) {
  try {
    const auto plans = derive_transport_plans(teg, sol);
    o.expect(static_cast<int>(plans.size()) == inst.storage_count(), tag + ": plan count");
    const PlanCheck pc = check_plans(teg, sol.y, plans);
    o.expect(pc.ok(), tag + ": " + pc.detail);
  } catch (const std::exception& e) {
    o.expect(false, tag + ": " + e.what());
  }
  o.expect(check_flow_count(teg, sol.y) == std::vector<int>(teg.layer_count(), inst.storage_count()),
           tag + ": flow count");
}

Outcome decoder_invariants() {
  Outcome o;
  int solutions = 0;
  const auto tiny = tiny_set();
  for (std::size_t i = 0; i < tiny.size(); ++i) {
    const Instance& inst = tiny[i];
    const TimeExpandedGraph teg(inst);
    const std::string tag = "tiny " + std::to_string(i);
    for (bool pair : {true, false}) {
      const auto r = brute_force_oracle(inst, teg, pair);
      if (r.feasible) {
        check_decoding(o, inst, teg, r.solution, tag + " oracle");
        ++solutions;
      }
    }
    for (Method m : {Method::MA, Method::RH, Method::GH}) {
      const auto r = run_method(m, inst, teg, seconds(20));
      if (!r.solution) continue;
      check_decoding(o, inst, teg, *r.solution, tag + " " + to_string(m));
      ++solutions;
    }
  }
  for (const auto& item : build_suite(3, 8)) {
    const TimeExpandedGraph teg(item.instance);
    for (double threshold : {0.0, 100.0, 250.0}) {
      GreedyConfig config;
      config.critical_threshold = threshold;
      check_decoding(o, item.instance, teg, simulate_refills(item.instance, teg, greedy_routing(item.instance, teg, config)),
                     item.id + " greedy " + fmt(threshold));
      ++solutions;
    }
  }
  o.detail = std::to_string(solutions) + " solutions decoded";
  return o;
}

Outcome heuristic_feasibility() {
  Outcome o;
  SolveLimits limits = seconds(4);
  limits.work_limit = 1.0 * kWorkUnitsPerSecond;
  std::vector<Instance> suite;
  for (int seed = 0; seed < 8; ++seed) suite.push_back(test::tiny_instance(seed));
  for (int seed = 0; seed < 4; ++seed) suite.push_back(medium_instance(seed));
  for (auto& item : build_suite(5, 8)) suite.push_back(std::move(item.instance));
  int runs = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const Instance& inst = suite[i];
    const TimeExpandedGraph teg(inst);
    const auto full = build_full_model(inst, teg);
    for (Method m : {Method::GH, Method::RH}) {
      const auto r = run_method(m, inst, teg, limits);
      const std::string tag = "instance " + std::to_string(i) + " " + to_string(m);
      o.expect(r.solution.has_value(), tag + ": no solution");
      if (!r.solution) continue;
      ++runs;
      const FlowSolution& sol = *r.solution;
      o.expect(check_routing(inst, teg, sol.y).empty(), tag + ": routing rules broken");
      const double violation = full.milp.max_violation(full_model_point(inst, teg, full, sol));
      const double cost_diff = std::abs(evaluate_cost(inst, teg, sol).total() - r.cost());
      worst = std::max({worst, violation, cost_diff});
      o.expect(violation <= 1e-6, tag + ": violation " + fmt(violation));
      o.expect(cost_diff <= 1e-6, tag + ": cost differs by " + fmt(cost_diff));
    }
  }
  o.detail = std::to_string(suite.size()) + " instances, " + std::to_string(runs) + " solutions, worst " + fmt(worst);
  return o;
}

Outcome trend() {
  Outcome o;
  BenchOptions options;
  options.limit_seconds = 60.0;
  const auto records = run_suite(build_suite(2024, 16), options);
  const TrendCheck t = trend_check(records);
  o.expect(t.median_holds, "median min(MA, RH) " + fmt(t.median_best_exact) + " above GH " + fmt(t.median_greedy));
  o.expect(t.gap_holds, "mean gap on " + t.largest_bin + ": RH " + fmt(t.mean_gap_rh) + " above MA " + fmt(t.mean_gap_ma));
  for (const auto& line : t.log) std::cout << "  log: " << line << "\n";
  o.detail = "median " + fmt(t.median_best_exact) + " vs " + fmt(t.median_greedy) + ", gaps on " + t.largest_bin +
             " RH " + fmt(t.mean_gap_rh) + " MA " + fmt(t.mean_gap_ma);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "prpmi-acceptance-determinism";
  fs::remove_all(root);
  std::vector<std::string> files;
  for (const char* run : {"a", "b"}) {
    const std::string dir = (root / run).string();
    const char* argv[] = {"prpmi", "bench", "--count", "8", "--seed", "17", "--limit", "2",
                          "--methods", "ma,rh,gh", "--output-dir", dir.c_str()};
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(std::size(argv)), argv, out, err);
    o.expect(code == cli::kExitOk, std::string("run ") + run + " exited with " + std::to_string(code));
    files.push_back(slurp(root / run / "records.csv"));
  }
  o.expect(!files[0].empty(), "records.csv is empty");
  o.expect(files[0] == files[1], "records.csv differs between runs");
  o.detail = std::to_string(std::count(files[0].begin(), files[0].end(), '\n')) + " lines, " +
             std::to_string(files[0].size()) + " bytes";
  fs::remove_all(root);
  return o;
}

Outcome format_and_marginals() {
  Outcome o;
  const fs::path path = fs::temp_directory_path() / "prpmi-acceptance-instance.json";
  for (int k = 0; k < 100; ++k) {
    GenerationSpec spec;
    spec.n_sources = 1 + k % 7;
    spec.dest_ratio = 4.33 + (8.5 - 4.33) * (k % 10) / 9.0;
    spec.storage_ratio = 1.26 + (1.5 - 1.26) * (k % 11) / 10.0;
    spec.demand_magnitude = k % 2 ? 130.0 : 85.0;
    spec.dissatisfaction = k % 4 < 2 ? kLowDissatisfaction : kHighDissatisfaction;
    spec.seed = 500 + static_cast<std::uint64_t>(k);
    const Instance inst = generate_instance(spec);
    const std::string tag = "instance " + std::to_string(k);

    o.expect(instance_from_json(instance_to_json(inst)) == inst, tag + ": json round trip");
    save_instance(inst, path);
    o.expect(load_instance(path) == inst, tag + ": file round trip");
    o.expect(validate_instance(inst).empty(), tag + ": validation");

    const double dr = static_cast<double>(inst.destination_count()) / inst.source_count();
    const double sr = static_cast<double>(inst.storage_count()) / inst.destination_count();
    o.expect(dr >= 4.33 && dr <= 8.5, tag + ": destination ratio " + fmt(dr));
    o.expect(sr >= 1.26 && sr <= 1.5, tag + ": storage ratio " + fmt(sr));

    for (int s = 0; s < inst.source_count(); ++s) {
      o.expect(inst.sources[s].refill_capacity == kSourceTable[s].capacity, tag + ": capacity of source " + std::to_string(s));
      o.expect(inst.sources[s].refill_price == kSourceTable[s].price, tag + ": price of source " + std::to_string(s));
    }
    for (int d = 0; d < inst.destination_count(); ++d) {
      const double weekday = daily_demand(inst, d, 1);
      o.expect(weekday == spec.demand_magnitude, tag + ": weekday demand " + fmt(weekday));
      o.expect(daily_demand(inst, d, 6) == 0.5 * weekday, tag + ": saturday demand");
      o.expect(daily_demand(inst, d, 7) == 0.25 * weekday, tag + ": sunday demand");
    }
  }
  // Table 3 itself.
  const double caps[] = {1300, 1500, 1700, 1000, 1000, 800, 500};
  const double prices[] = {9.0, 8.0, 8.3, 8.0, 8.0, 10.0, 7.0};
  for (int s = 0; s < 7; ++s)
    o.expect(kSourceTable[s].capacity == caps[s] && kSourceTable[s].price == prices[s], "source table row " + std::to_string(s));
  fs::remove(path);
  o.detail = "100 generated instances";
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "oracle equivalence", oracle_equivalence},
      {2, "relaxation bound", relaxation_bound},
      {3, "linearization kernels", linearization_kernels},
      {4, "decoder invariants", decoder_invariants},
      {5, "heuristic feasibility", heuristic_feasibility},
      {6, "trend check", trend},
      {7, "bench determinism", determinism},
      {8, "instance format and generator marginals", format_and_marginals},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (const auto& c : all) selected.push_back(c.id);

  int failed = 0;
  for (int id : selected) {
    const auto it = std::find_if(all.begin(), all.end(), [&](const Criterion& c) { return c.id == id; });
    if (it == all.end()) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome result;
    try {
      result = it->run();
    } catch (const std::exception& e) {
      result.pass = false;
      result.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << id << " (" << it->name << "): " << (result.pass ? "PASS" : "FAIL") << " - "
              << result.detail << " [" << fmt(std::round(secs * 10) / 10) << " s]\n";
    for (const auto& f : result.failures) std::cout << "  " << f << "\n";
    std::cout.flush();
    failed += !result.pass;
  }
  return failed == 0 ? 0 : 1;
}
