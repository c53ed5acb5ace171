#include "prpmi/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>

#include "prpmi/dense_simplex.hpp"

namespace prpmi {

namespace {

constexpr double kSettleTol = 1e-9;

// Continuous program left once storages and pairings are fixed.
class Residual {
 public:
  struct Expr {
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;
    double eval(const std::vector<double>& x) const {
      double v = constant;
      for (auto [j, c] : terms) v += c * x[j];
      return v;
    }
  };

  Residual(const Instance& inst, const TimeExpandedGraph& teg, const StorageFlow& y,
           const std::vector<std::vector<int>>* sigma)
      : inst_(inst), teg_(teg), y_(y), cap_(inst.storage_capacity), horizon_(inst.horizon) {
    const InitialFlow init = initial_flow(inst, teg);
    init_f_ = init.f;
    fvar_.assign(teg.arc_count(), -1);
    for (ArcId a = 0; a < teg.arc_count(); ++a)
      if (y[a] && teg.day(a).value() > 0) fvar_[a] = lp_.add_variable(0.0, cap_, 0.0);
    const int ns = teg.source_count(), nd = teg.destination_count();
    rvar_.resize(ns * horizon_);
    for (int s = 0; s < ns; ++s)
      for (int j = 1; j <= horizon_; ++j)
        rvar_[s * horizon_ + j - 1] = lp_.add_variable(0.0, inst.sources[s].refill_capacity, inst.sources[s].refill_price);
    cells_.resize(nd * horizon_);
    for (int d = 0; d < nd; ++d)
      for (int j = 1; j <= horizon_; ++j) {
        Cell& c = cells_[d * horizon_ + j - 1];
        c.d = d;
        c.j = j;
        c.zl = lp_.add_variable(0.0, cap_, -inst.cost.variable_dissatisfaction);
        c.zr = lp_.add_variable(0.0, cap_, -inst.cost.variable_dissatisfaction);
        c.u = lp_.add_variable(0.0, 1.0, inst.cost.fixed_dissatisfaction);
        lp_.offset += inst.cost.variable_dissatisfaction * daily_demand(inst, d, j);
      }
    for (ArcId a = 0; a < teg.arc_count(); ++a) {
      if (!y[a]) continue;
      if (teg.kind(a) == ArcKind::SourceToDest)
        lp_.offset += inst.cost.transport * inst.transport.distance[teg.from(a)][teg.to(a)];
      else if (teg.kind(a) == ArcKind::DestToSource)
        lp_.offset += inst.cost.transport * inst.transport.distance[teg.to(a)][teg.from(a)];
    }
    for (int j = 1; j <= horizon_; ++j) {
      for (int s = 0; s < ns; ++s) source_rows(s, j, sigma ? &(*sigma)[s * horizon_ + j - 1] : nullptr);
      for (int d = 0; d < nd; ++d) destination_rows(cells_[d * horizon_ + j - 1]);
    }
  }

  struct Cell {
    int d = 0, j = 0;
    VarId zl = -1, zr = -1, u = -1;
    Expr stock, serving;
    double first = 0.0, second = 0.0;
  };

  const DenseLp& lp() const { return lp_; }
  const std::vector<Cell>& cells() const { return cells_; }

  // Adds lhs (sense) rhs as a dense row.
  static void add(DenseLp& lp, const Expr& lhs, Sense sense, const Expr& rhs) {
    std::vector<double> row(lp.n, 0.0);
    for (auto [j, c] : lhs.terms) row[j] += c;
    for (auto [j, c] : rhs.terms) row[j] -= c;
    lp.add_row(std::move(row), sense, rhs.constant - lhs.constant);
  }

  static Expr var(int j) { return Expr{{{j, 1.0}}, 0.0}; }
  static Expr constant(double v) { return Expr{{}, v}; }
  static Expr minus(Expr a, const Expr& b) {
    for (auto [j, c] : b.terms) a.terms.emplace_back(j, -c);
    a.constant -= b.constant;
    return a;
  }

  Expr flow(ArcId a) const {
    if (fvar_[a] >= 0) return var(fvar_[a]);
    return constant(teg_.day(a).value() == 0 ? init_f_[a] : 0.0);
  }

  // Regime choices for one cell: 0 = all demand met, 1..3 = unmet with the
  // first part, the second part or both limited by stock.
  static void fix_regime(DenseLp& lp, const Cell& c, int option) {
    const bool stock_first = option == 1 || option == 3;
    const bool stock_second = option == 2 || option == 3;
    if (option == 0) {
      lp.upper[c.u] = 0.0;
    } else {
      lp.lower[c.u] = 1.0;
    }
    add(lp, var(c.zl), Sense::GreaterEqual, stock_first ? c.stock : constant(c.first));
    add(lp, var(c.zr), Sense::GreaterEqual, stock_second ? c.serving : constant(c.second));
  }

  bool settled(const Cell& c, const std::vector<double>& x) const {
    const double zl = x[c.zl], zr = x[c.zr], u = x[c.u];
    if (std::abs(zl - std::min(c.stock.eval(x), c.first)) > kSettleTol) return false;
    if (std::abs(zr - std::min(c.serving.eval(x), c.second)) > kSettleTol) return false;
    const double unmet = c.first + c.second - zl - zr;
    if (u <= kSettleTol) return unmet <= kSettleTol;
    return u >= 1.0 - kSettleTol;
  }

  FlowSolution solution(const std::vector<double>& x, const std::vector<std::vector<int>>* sigma) const {
    FlowSolution sol;
    sol.y = y_;
    sol.f.assign(teg_.arc_count(), 0.0);
    for (ArcId a = 0; a < teg_.arc_count(); ++a)
      if (y_[a]) sol.f[a] = std::clamp(flow(a).eval(x), 0.0, cap_);
    const int nd = teg_.destination_count(), ns = teg_.source_count();
    sol.z_first.resize(nd * horizon_);
    sol.z_second.resize(nd * horizon_);
    sol.unmet_flag.resize(nd * horizon_);
    for (std::size_t k = 0; k < cells_.size(); ++k) {
      sol.z_first[k] = x[cells_[k].zl];
      sol.z_second[k] = x[cells_[k].zr];
      sol.unmet_flag[k] = cells_[k].first + cells_[k].second - sol.z_first[k] - sol.z_second[k] > kUnmetTolerance;
    }
    sol.refill.resize(ns * horizon_);
    for (std::size_t k = 0; k < rvar_.size(); ++k) sol.refill[k] = x[rvar_[k]];
    if (sigma) sol.sigma = *sigma;
    sol.cost = evaluate_cost(inst_, teg_, sol);
    return sol;
  }

 private:
  void source_rows(int s, int j, const std::vector<int>* pairing) {
    const auto in = assignment_inflow_arcs(teg_, s, j);
    const auto out = assignment_outflow_arcs(teg_, s, j);
    Expr lhs = var(rvar_[s * horizon_ + j - 1]);
    Expr rhs;
    for (ArcId a : in)
      if (y_[a]) {
        const Expr e = flow(a);
        lhs.terms.insert(lhs.terms.end(), e.terms.begin(), e.terms.end());
        lhs.constant += e.constant;
      }
    for (ArcId a : out)
      if (y_[a]) rhs.terms.emplace_back(fvar_[a], 1.0);
    add(lp_, lhs, Sense::Equal, rhs);
    if (pairing)
      for (std::size_t n = 0; n < in.size(); ++n)
        if ((*pairing)[n] >= 0) add(lp_, flow(out[(*pairing)[n]]), Sense::GreaterEqual, flow(in[n]));
    const TimeIndex L = TimeIndex::first_part(j), R = TimeIndex::second_part(j);
    for (int k = 0; k < teg_.slot_limit(s); ++k) {
      const ArcId a = teg_.source_self(s, k, L);
      if (y_[a]) add(lp_, flow(teg_.source_self(s, k, R)), Sense::Equal, flow(a));
    }
  }

  void destination_rows(Cell& c) {
    const int d = c.d, j = c.j;
    const TimeIndex P(2 * j - 2), L = TimeIndex::first_part(j), R = TimeIndex::second_part(j);
    int hour = kNoSwapHour;
    int from = -1, back = -1;
    for (int s = 0; s < teg_.source_count(); ++s) {
      if (y_[teg_.source_to_dest(s, d, L)]) from = s;
      if (y_[teg_.dest_to_source(d, s, R)]) back = s;
    }
    if (from >= 0) hour = inst_.transport.swap_hour(from, d);
    c.first = cumulative_demand(inst_, d, j, hour);
    c.second = daily_demand(inst_, d, j) - c.first;
    c.stock = flow(teg_.dest_self(d, P));
    const Expr left = flow(teg_.dest_self(d, L));
    add(lp_, left, Sense::Equal, minus(c.stock, var(c.zl)));
    add(lp_, var(c.zl), Sense::LessEqual, c.stock);
    add(lp_, var(c.zl), Sense::LessEqual, constant(c.first));
    if (from >= 0) {
      c.serving = flow(teg_.source_to_dest(from, d, L));
      add(lp_, flow(teg_.dest_to_source(d, back, R)), Sense::Equal, left);
    } else {
      c.serving = left;
    }
    add(lp_, flow(teg_.dest_self(d, R)), Sense::Equal, minus(c.serving, var(c.zr)));
    add(lp_, var(c.zr), Sense::LessEqual, c.serving);
    add(lp_, var(c.zr), Sense::LessEqual, constant(c.second));
    Expr unmet = constant(c.first + c.second);
    unmet.terms = {{c.zl, -1.0}, {c.zr, -1.0}, {c.u, -cap_}};
    add(lp_, unmet, Sense::LessEqual, constant(0.0));
  }

  const Instance& inst_;
  const TimeExpandedGraph& teg_;
  const StorageFlow& y_;
  double cap_;
  int horizon_;
  std::vector<double> init_f_;
  std::vector<int> fvar_;
  std::vector<int> rvar_;
  std::vector<Cell> cells_;
  DenseLp lp_;
};

struct Best {
  std::mutex mu;
  std::atomic<double> value{kInfinity};
  FlowSolution solution;
  bool found = false;

  void offer(double v, const FlowSolution& sol) {
    std::lock_guard<std::mutex> lock(mu);
    if (found && v >= value.load()) return;
    value.store(v);
    solution = sol;
    found = true;
  }
};

struct Counters {
  long routings = 0, pairings = 0, lp_solves = 0;
};

class Enumerator {
 public:
  Enumerator(const Instance& inst, const TimeExpandedGraph& teg, bool pair, Best& best)
      : inst_(inst), teg_(teg), pair_(pair), best_(best), horizon_(inst.horizon) {}

  Counters counters;

  // Every delivery/return choice of one day. choice[d] = -1 for no delivery,
  // otherwise from * S + back.
  std::vector<std::vector<int>> day_options() const {
    const int nd = teg_.destination_count(), ns = teg_.source_count();
    std::vector<std::vector<int>> out;
    std::vector<int> choice(nd, -1);
    while (true) {
      out.push_back(choice);
      int d = 0;
      while (d < nd) {
        if (++choice[d] < ns * ns) break;
        choice[d] = -1;
        ++d;
      }
      if (d == nd) break;
    }
    return out;
  }

  // Applies day j's choice on top of y; returns false when a source rule fails.
  bool apply_day(StorageFlow& y, int j, const std::vector<int>& choice) const {
    const int nd = teg_.destination_count(), ns = teg_.source_count();
    const TimeIndex L = TimeIndex::first_part(j), R = TimeIndex::second_part(j);
    std::vector<int> present(ns, 0), departing(ns, 0), returning(ns, 0);
    for (int s = 0; s < ns; ++s)
      for (ArcId a : assignment_inflow_arcs(teg_, s, j)) present[s] += y[a];
    for (int d = 0; d < nd; ++d) {
      y[teg_.dest_self(d, L)] = 1;
      y[teg_.dest_self(d, R)] = 1;
      if (choice[d] < 0) continue;
      const int from = choice[d] / ns, back = choice[d] % ns;
      y[teg_.source_to_dest(from, d, L)] = 1;
      y[teg_.dest_to_source(d, back, R)] = 1;
      ++departing[from];
      ++returning[back];
    }
    for (int s = 0; s < ns; ++s) {
      if (present[s] > teg_.slot_limit(s) || departing[s] > present[s]) return false;
      const int parked = present[s] - departing[s];
      for (int k = 0; k < parked; ++k) {
        y[teg_.source_self(s, k, L)] = 1;
        y[teg_.source_self(s, k, R)] = 1;
      }
    }
    return true;
  }

  void dfs_days(StorageFlow& y, int j) {
    if (j > horizon_) {
      ++counters.routings;
      evaluate_routing(y);
      return;
    }
    for (const auto& choice : day_options()) {
      StorageFlow next = y;
      if (!apply_day(next, j, choice)) continue;
      dfs_days(next, j + 1);
    }
  }

  void evaluate_routing(const StorageFlow& y) {
    double transport = 0.0;
    for (ArcId a = 0; a < teg_.arc_count(); ++a) {
      if (!y[a]) continue;
      if (teg_.kind(a) == ArcKind::SourceToDest)
        transport += inst_.cost.transport * inst_.transport.distance[teg_.from(a)][teg_.to(a)];
      else if (teg_.kind(a) == ArcKind::DestToSource)
        transport += inst_.cost.transport * inst_.transport.distance[teg_.to(a)][teg_.from(a)];
    }
    if (transport >= best_.value.load() - 1e-9) return;
    if (!pair_) {
      ++counters.pairings;
      solve_residual(y, nullptr);
      return;
    }
    const int ns = teg_.source_count();
    std::vector<std::vector<int>> sigma(ns * horizon_);
    std::vector<std::vector<int>> in_active(ns * horizon_), out_active(ns * horizon_);
    for (int s = 0; s < ns; ++s)
      for (int j = 1; j <= horizon_; ++j) {
        const int k = s * horizon_ + j - 1;
        const auto in = assignment_inflow_arcs(teg_, s, j);
        const auto out = assignment_outflow_arcs(teg_, s, j);
        for (int n = 0; n < static_cast<int>(in.size()); ++n)
          if (y[in[n]]) in_active[k].push_back(n);
        for (int n = 0; n < static_cast<int>(out.size()); ++n)
          if (y[out[n]]) out_active[k].push_back(n);
        sigma[k].assign(in.size(), -1);
      }
    enumerate_pairings(y, 0, sigma, in_active, out_active);
  }

  void enumerate_pairings(const StorageFlow& y, int k, std::vector<std::vector<int>>& sigma,
                          const std::vector<std::vector<int>>& in_active,
                          const std::vector<std::vector<int>>& out_active) {
    if (k == static_cast<int>(sigma.size())) {
      ++counters.pairings;
      solve_residual(y, &sigma);
      return;
    }
    std::vector<int> perm = out_active[k];
    do {
      for (std::size_t i = 0; i < perm.size(); ++i) sigma[k][in_active[k][i]] = perm[i];
      enumerate_pairings(y, k + 1, sigma, in_active, out_active);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  void solve_residual(const StorageFlow& y, const std::vector<std::vector<int>>* sigma) {
    Residual res(inst_, teg_, y, sigma);
    branch(res, res.lp(), sigma);
  }

  void branch(const Residual& res, const DenseLp& lp, const std::vector<std::vector<int>>* sigma) {
    ++counters.lp_solves;
    const DenseResult r = solve_dense(lp);
    if (r.status != LpStatus::Optimal) return;
    if (r.objective >= best_.value.load() - 1e-9) return;
    const Residual::Cell* open = nullptr;
    for (const auto& c : res.cells())
      if (!res.settled(c, r.x)) {
        open = &c;
        break;
      }
    if (!open) {
      best_.offer(r.objective, res.solution(r.x, sigma));
      return;
    }
    for (int option = 0; option < 4; ++option) {
      DenseLp child = lp;
      Residual::fix_regime(child, *open, option);
      branch(res, child, sigma);
    }
  }

 private:
  const Instance& inst_;
  const TimeExpandedGraph& teg_;
  bool pair_;
  Best& best_;
  int horizon_;
};

}  // namespace

OracleResult brute_force_oracle(const Instance& inst, const TimeExpandedGraph& teg, bool pair_storages,
                                const OracleLimits& limits) {
  if (inst.source_count() > limits.max_sources || inst.destination_count() > limits.max_destinations ||
      inst.horizon > limits.max_horizon || inst.storage_count() > limits.max_storages)
    throw OracleSizeError("instance too large for enumeration: " + std::to_string(inst.source_count()) +
                          " sources, " + std::to_string(inst.destination_count()) + " destinations, horizon " +
                          std::to_string(inst.horizon) + ", " + std::to_string(inst.storage_count()) + " storages");
  Best best;
  OracleResult out;
  const InitialFlow init = initial_flow(inst, teg);
  if (inst.horizon == 0) {
    Enumerator e(inst, teg, pair_storages, best);
    StorageFlow y = init.y;
    e.dfs_days(y, 1);
    out.routings = e.counters.routings;
    out.pairings = e.counters.pairings;
    out.lp_solves = e.counters.lp_solves;
  } else {
    Enumerator root(inst, teg, pair_storages, best);
    const auto options = root.day_options();
    long routings = 0, pairings = 0, lp_solves = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : routings, pairings, lp_solves)
    for (int i = 0; i < static_cast<int>(options.size()); ++i) {
      Enumerator e(inst, teg, pair_storages, best);
      StorageFlow y = init.y;
      if (e.apply_day(y, 1, options[i])) e.dfs_days(y, 2);
      routings += e.counters.routings;
      pairings += e.counters.pairings;
      lp_solves += e.counters.lp_solves;
    }
    out.routings = routings;
    out.pairings = pairings;
    out.lp_solves = lp_solves;
  }
  out.feasible = best.found;
  if (best.found) {
    out.value = best.value.load();
    out.solution = std::move(best.solution);
  }
  return out;
}

}  // namespace prpmi
