#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "prpmi/dense_simplex.hpp"
#include "prpmi/dual_simplex.hpp"
#include "prpmi/kernels.hpp"
#include "prpmi/model.hpp"
#include "prpmi/solver.hpp"
#include "support.hpp"

using namespace prpmi;
namespace fs = std::filesystem;

namespace {

SolveLimits quick() {
  SolveLimits l;
  l.wall_clock = 30;
  return l;
}

// Random bounded LP whose rows hold at a random interior point.
MilpModel random_lp(std::mt19937_64& rng, int n, int rows, bool integer) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MilpModel m;
  std::vector<double> point(n);
  for (int j = 0; j < n; ++j) {
    if (integer && j % 2 == 0) {
      m.add_binary("x" + std::to_string(j));
      point[j] = unit(rng) < 0.5 ? 0.0 : 1.0;
    } else {
      m.add_continuous("x" + std::to_string(j), 0.0, 1.0 + 9.0 * unit(rng));
      point[j] = unit(rng) * m.variable(j).upper;
    }
  }
  for (int r = 0; r < rows; ++r) {
    LinExpr e;
    double act = 0.0;
    for (int j = 0; j < n; ++j)
      if (unit(rng) < 0.5) {
        const double c = std::round(20.0 * unit(rng) - 10.0);
        e.add(j, c);
        act += c * point[j];
      }
    const double pick = unit(rng);
    const Sense s = pick < 0.4 ? Sense::LessEqual : pick < 0.8 ? Sense::GreaterEqual : Sense::Equal;
    const double slack = s == Sense::Equal ? 0.0 : 5.0 * unit(rng);
    m.add_constraint("r" + std::to_string(r), e, s, s == Sense::GreaterEqual ? act - slack : act + slack);
  }
  LinExpr obj;
  for (int j = 0; j < n; ++j) obj.add(j, std::round(20.0 * unit(rng) - 10.0));
  m.add_objective(obj);
  return m;
}

void write_script(const fs::path& path, const std::string& body) {
  std::ofstream(path) << "#!/bin/sh\n" << body;
  fs::permissions(path, fs::perms::owner_all);
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("prpmi-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("lp basics") {
  MilpModel m;
  const VarId x = m.add_continuous("x", 0, 100);
  m.add_constraint("lo", LinExpr::var(x), Sense::GreaterEqual, 3.0);
  m.add_objective(LinExpr::var(x));
  const auto out = solve_reference(m, quick());
  REQUIRE(out.status == SolveStatus::Optimal);
  CHECK(*out.value == doctest::Approx(3.0));
  CHECK(*out.gap() == 0.0);

  MilpModel bad;
  const VarId y = bad.add_continuous("y", 0, 10);
  bad.add_constraint("up", LinExpr::var(y), Sense::LessEqual, 0.0);
  bad.add_constraint("down", LinExpr::var(y), Sense::GreaterEqual, 1.0);
  CHECK(solve_reference(bad, quick()).status == SolveStatus::Infeasible);
}

TEST_CASE("model registry") {
  MilpModel m;
  const VarId x = m.add_continuous("x", 0, 1);
  const VarId y = m.add_binary("y");
  CHECK(m.find_variable("x") == x);
  CHECK_FALSE(m.find_variable("z").has_value());
  const auto r = m.add_constraint("c", LinExpr::var(x) + LinExpr::var(y) + LinExpr::var(x, 2.0) + 1.0, Sense::LessEqual, 4.0);
  REQUIRE(r.has_value());
  const auto& row = m.constraint(*r);
  REQUIRE(row.terms.size() == 2);
  CHECK(row.terms[0].coef == 3.0);
  CHECK(row.rhs == 3.0);
  CHECK_FALSE(m.add_constraint("k", LinExpr(1.0), Sense::LessEqual, 2.0).has_value());
  CHECK_FALSE(m.trivially_infeasible());
  m.add_constraint("k2", LinExpr(3.0), Sense::LessEqual, 2.0);
  CHECK(m.trivially_infeasible());
  CHECK(relative_gap(100.0, 90.0) == doctest::Approx(0.1));
}

TEST_CASE("dense simplex on a textbook lp") {
  // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
  DenseLp lp;
  lp.add_variable(0, kInfinity, -3);
  lp.add_variable(0, kInfinity, -5);
  lp.add_row({1, 0}, Sense::LessEqual, 4);
  lp.add_row({0, 2}, Sense::LessEqual, 12);
  lp.add_row({3, 2}, Sense::LessEqual, 18);
  const auto r = solve_dense(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.objective == doctest::Approx(-36.0));
  CHECK(r.x[0] == doctest::Approx(2.0));
  CHECK(r.x[1] == doctest::Approx(6.0));

  DenseLp open;
  open.add_variable(0, kInfinity, -1);
  CHECK(solve_dense(open).status == LpStatus::Unbounded);
}

TEST_CASE("dual simplex agrees with the dense tableau") {
  std::mt19937_64 rng(17);
  int optimal = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const MilpModel m = random_lp(rng, 6 + trial % 7, 4 + trial % 5, false);
    const auto dense = solve_dense(DenseLp::from_model(m));
    for (bool parallel : {false, true}) {
      DualSimplexOptions opt;
      opt.parallel = parallel;
      DualSimplex dual(LpProblem::from_model(m), opt);
      const LpStatus st = dual.solve();
      CHECK(st == dense.status);
      if (st == LpStatus::Optimal) {
        CHECK(dual.objective() == doctest::Approx(dense.objective).epsilon(1e-7));
        CHECK(dual.dual_bound() <= dual.objective() + 1e-6);
        CHECK(m.max_violation(dual.primal()) <= 1e-6);
      }
    }
    optimal += dense.status == LpStatus::Optimal;
  }
  CHECK(optimal > 20);
}

TEST_CASE("dual simplex warm start after bound changes") {
  std::mt19937_64 rng(3);
  const MilpModel m = random_lp(rng, 10, 6, false);
  DualSimplex dual(LpProblem::from_model(m));
  REQUIRE(dual.solve() == LpStatus::Optimal);
  MilpModel tightened = m;
  const double mid = 0.5 * dual.col_upper(1);
  dual.set_col_bounds(1, 0.0, mid);
  tightened.set_bounds(1, 0.0, mid);
  const LpStatus st = dual.solve();
  const auto dense = solve_dense(DenseLp::from_model(tightened));
  CHECK(st == dense.status);
  if (st == LpStatus::Optimal) CHECK(dual.objective() == doctest::Approx(dense.objective).epsilon(1e-7));
}

TEST_CASE("branch and bound matches enumeration") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 15; ++trial) {
    const MilpModel m = random_lp(rng, 8, 5, true);
    // Enumerate the binaries; the rest is an lp.
    double best = kInfinity;
    std::vector<VarId> bins;
    for (VarId v = 0; v < m.variable_count(); ++v)
      if (m.variable(v).type == VarType::Binary) bins.push_back(v);
    for (unsigned mask = 0; mask < (1u << bins.size()); ++mask) {
      MilpModel fixed = m;
      for (std::size_t i = 0; i < bins.size(); ++i) {
        const double b = (mask >> i) & 1u;
        fixed.set_bounds(bins[i], b, b);
      }
      const auto r = solve_dense(DenseLp::from_model(fixed));
      if (r.status == LpStatus::Optimal) best = std::min(best, r.objective);
    }
    for (LpEngine engine : {LpEngine::Dual, LpEngine::Dense}) {
      ReferenceOptions opt;
      opt.engine = engine;
      opt.record_trace = true;
      const auto out = solve_reference(m, quick(), opt);
      if (!std::isfinite(best)) {
        CHECK(out.status == SolveStatus::Infeasible);
        continue;
      }
      REQUIRE(out.status == SolveStatus::Optimal);
      CHECK(*out.value == doctest::Approx(best).epsilon(1e-7));
      std::vector<double> x = out.x;
      CHECK(incumbent_violation(m, x) <= 1e-6);
      for (std::size_t i = 1; i < out.trace.size(); ++i) {
        CHECK(out.trace[i].bound >= out.trace[i - 1].bound - 1e-9);
        CHECK(out.trace[i].incumbent <= out.trace[i - 1].incumbent + 1e-9);
      }
    }
  }
}

TEST_CASE("node limit stops the search") {
  const Instance inst = test::tiny_instance(3);
  const TimeExpandedGraph teg(inst);
  const auto full = build_full_model(inst, teg);
  SolveLimits limits = quick();
  limits.node_limit = 1;
  const auto out = solve_reference(full.milp, limits);
  CHECK(out.nodes <= 2);
  CHECK(out.status != SolveStatus::Optimal);
  if (out.has_incumbent()) CHECK(out.bound <= *out.value + 1e-6);
}

TEST_CASE("lp engines agree on a tiny model") {
  const Instance inst = test::tiny_instance(1);
  const TimeExpandedGraph teg(inst);
  const auto full = build_full_model(inst, teg);
  ReferenceOptions dense;
  dense.engine = LpEngine::Dense;
  const auto a = solve_reference(full.milp, quick());
  const auto b = solve_reference(full.milp, quick(), dense);
  REQUIRE(a.status == SolveStatus::Optimal);
  REQUIRE(b.status == SolveStatus::Optimal);
  CHECK(*a.value == doctest::Approx(*b.value).epsilon(1e-9));
}

TEST_CASE("lp file round trip") {
  const Instance inst = test::tiny_instance(1);
  const TimeExpandedGraph teg(inst);
  const auto full = build_full_model(inst, teg);
  const std::string text = to_lp_string(full.milp);
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("Bounds") != std::string::npos);
  CHECK(text.find("Binaries") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);

  const MilpModel back = parse_lp(text);
  REQUIRE(back.variable_count() >= full.milp.variable_count());
  for (VarId v = 0; v < full.milp.variable_count(); ++v) {
    const auto& a = full.milp.variable(v);
    const auto id = back.find_variable(a.name);
    REQUIRE(id.has_value());
    const auto& b = back.variable(*id);
    CHECK(a.type == b.type);
    CHECK(a.lower == b.lower);
    CHECK(a.upper == b.upper);
    CHECK(full.milp.objective()[v] == back.objective()[*id]);
  }
  REQUIRE(back.constraint_count() == full.milp.constraint_count());
  for (RowId r = 0; r < full.milp.constraint_count(); ++r) {
    const auto& a = full.milp.constraint(r);
    const auto id = back.find_constraint(a.name);
    REQUIRE(id.has_value());
    const auto& b = back.constraint(*id);
    CHECK(a.sense == b.sense);
    CHECK(a.rhs == b.rhs);
    std::map<std::string, double> ta, tb;
    for (const auto& t : a.terms) ta[full.milp.variable(t.var).name] = t.coef;
    for (const auto& t : b.terms) tb[back.variable(t.var).name] = t.coef;
    CHECK(ta == tb);
  }
}

TEST_CASE("lp objective constant") {
  MilpModel m;
  const VarId x = m.add_binary("x");
  m.add_objective(LinExpr::var(x, 2.0) + 7.5);
  m.add_constraint("c", LinExpr::var(x), Sense::LessEqual, 1.0);
  const std::string text = to_lp_string(m);
  CHECK(text.find("obj_const") != std::string::npos);
  const MilpModel back = parse_lp(text);
  CHECK(back.objective_offset() == 7.5);
  const auto bx = back.find_variable("x");
  REQUIRE(bx.has_value());
  CHECK(back.variable(*bx).type == VarType::Binary);

  const fs::path dir = scratch_dir("lp");
  export_lp(m, dir / "m.lp");
  CHECK(read_lp(dir / "m.lp").objective_offset() == 7.5);
  CHECK_THROWS(export_lp(m, dir / "missing" / "m.lp"));
  CHECK_THROWS_AS(parse_lp("Minimize\n obj: 2 x\nSubject To\n c: x <=\nEnd\n"), std::runtime_error);
}

TEST_CASE("solution file formats") {
  const auto plain = parse_solution("# comment\nstatus optimal\nx 1\ny 2.5\n");
  CHECK(plain.status == "optimal");
  REQUIRE(plain.values.size() == 2);
  CHECK(plain.values[1].first == "y");
  CHECK(plain.values[1].second == 2.5);

  const auto xml = parse_solution(
      "<?xml version=\"1.0\"?>\n<CPLEXSolution>\n<header solutionStatusString=\"integer optimal solution\"/>\n"
      "<variables>\n<variable name=\"x\" index=\"0\" value=\"1\"/>\n<variable name=\"y\" index=\"1\" "
      "value=\"-3e-1\"/>\n</variables>\n</CPLEXSolution>\n");
  CHECK(xml.status == "integer optimal solution");
  REQUIRE(xml.values.size() == 2);
  CHECK(xml.values[1].second == doctest::Approx(-0.3));

  CHECK_THROWS(parse_solution("x not-a-number\n"));
}

TEST_CASE("external solver protocol") {
  MilpModel m;
  const VarId x = m.add_binary("x");
  const VarId y = m.add_continuous("y", 0, 10);
  m.add_constraint("c", LinExpr::var(x) + LinExpr::var(y), Sense::GreaterEqual, 2.0);
  m.add_objective(LinExpr::var(x, 3.0) + LinExpr::var(y));
  const fs::path dir = scratch_dir("ext");
  SolveLimits limits;
  limits.wall_clock = 1.0;

  CHECK(run_external(m, "false", limits, dir / "f").status == SolveStatus::Error);
  CHECK(run_external(m, (dir / "absent").string(), limits, dir / "a").status == SolveStatus::Error);

  write_script(dir / "good.sh", "while [ $# -gt 0 ]; do [ \"$1\" = --sol ] && out=$2; shift; done\n"
                                "printf 'status optimal\\nx 0\\ny 2\\n' > \"$out\"\n");
  const auto good = run_external(m, (dir / "good.sh").string(), limits, dir / "g");
  REQUIRE(good.status == SolveStatus::Optimal);
  CHECK(*good.value == 2.0);
  CHECK(good.x[y] == 2.0);

  write_script(dir / "argv.sh", "echo \"$@\" > \"$(dirname \"$1\")/argv.txt\"\n"
                                "while [ $# -gt 0 ]; do [ \"$1\" = --sol ] && out=$2; shift; done\n"
                                "echo 'x 1' > \"$out\"; echo 'y 1' >> \"$out\"\n");
  const auto feasible = run_external(m, (dir / "argv.sh").string(), limits, dir / "v");
  CHECK(feasible.status == SolveStatus::Optimal);
  CHECK(*feasible.value == 4.0);
  std::ifstream argv_file(dir / "v" / "argv.txt");
  std::string argv_line;
  std::getline(argv_file, argv_line);
  CHECK(argv_line.find("--time-limit 1 --sol") != std::string::npos);

  write_script(dir / "infeasible.sh", "while [ $# -gt 0 ]; do [ \"$1\" = --sol ] && out=$2; shift; done\n"
                                      "echo 'status infeasible' > \"$out\"\n");
  CHECK(run_external(m, (dir / "infeasible.sh").string(), limits, dir / "i").status == SolveStatus::Infeasible);

  write_script(dir / "wrong.sh", "while [ $# -gt 0 ]; do [ \"$1\" = --sol ] && out=$2; shift; done\n"
                                 "echo 'x 0' > \"$out\"; echo 'y 0' >> \"$out\"\n");
  const auto wrong = run_external(m, (dir / "wrong.sh").string(), limits, dir / "w");
  CHECK(wrong.status == SolveStatus::Error);
  CHECK(wrong.diagnostic.find("violates") != std::string::npos);

  write_script(dir / "noisy.sh", "echo something broke; exit 3\n");
  const auto noisy = run_external(m, (dir / "noisy.sh").string(), limits, dir / "n");
  CHECK(noisy.status == SolveStatus::Error);
  CHECK(noisy.diagnostic.find("something broke") != std::string::npos);

  SolveLimits brief;
  brief.wall_clock = 0.1;
  write_script(dir / "sleepy.sh", "sleep 30\n");
  const auto sleepy = run_external(m, (dir / "sleepy.sh").string(), brief, dir / "s");
  CHECK(sleepy.status == SolveStatus::Error);
  CHECK(sleepy.hit_wall_clock);
  CHECK(sleepy.seconds < 10.0);
}

TEST_CASE("serial and parallel kernels agree") {
  std::mt19937_64 rng(5);
  const MilpModel m = random_lp(rng, 400, 300, true);
  const LpProblem lp = LpProblem::from_model(m);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> rho(lp.rows()), a(lp.cols()), b(lp.cols());
  for (double& v : rho) v = unit(rng);
  std::vector<std::uint8_t> mask(lp.cols());
  for (auto& v : mask) v = unit(rng) > 0.0;
  kernels::pivot_row_serial(lp.a, rho, mask, a);
  kernels::pivot_row_parallel(lp.a, rho, mask, b);
  CHECK(a == b);

  std::vector<double> x(lp.cols()), lo(lp.cols(), 0.0), hi(lp.cols(), 1.0), w(lp.cols());
  for (int j = 0; j < lp.cols(); ++j) {
    x[j] = 1.5 * unit(rng);
    w[j] = 1.0 + unit(rng) * unit(rng);
  }
  const auto p = kernels::max_infeasibility_serial(x, lo, hi, 1e-9);
  const auto q = kernels::max_infeasibility_parallel(x, lo, hi, 1e-9);
  CHECK(p.index == q.index);
  CHECK(p.value == q.value);
  const auto pw = kernels::max_infeasibility_serial(x, lo, hi, 1e-9, w);
  const auto qw = kernels::max_infeasibility_parallel(x, lo, hi, 1e-9, w);
  CHECK(pw.index == qw.index);

  const auto r = kernels::max_row_violation_serial(m, x);
  const auto s = kernels::max_row_violation_parallel(m, x);
  CHECK(r.index == s.index);
  CHECK(r.value == s.value);
}

TEST_CASE("work budget") {
  WorkBudget budget(100.0, std::chrono::steady_clock::time_point::max());
  budget.charge(60);
  CHECK_FALSE(budget.exhausted());
  budget.charge(60);
  CHECK(budget.work_exhausted());

  const Instance inst = test::tiny_instance(3);
  const TimeExpandedGraph teg(inst);
  const auto full = build_full_model(inst, teg);
  SolveLimits tight = quick();
  tight.work_limit = 1e4;
  const auto a = solve_reference(full.milp, tight);
  const auto b = solve_reference(full.milp, tight);
  CHECK(a.status == b.status);
  CHECK(a.nodes == b.nodes);
  CHECK(a.value == b.value);
}

}
