#include "prpmi/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace prpmi {

namespace {

int day_index(int who, int day, int horizon) { return who * horizon + (day - 1); }

std::string arc_name(const TimeExpandedGraph& teg, ArcId a) {
  const std::string t = teg.day(a).label(teg.horizon());
  const std::string from = std::to_string(teg.from(a));
  const std::string to = std::to_string(teg.to(a));
  switch (teg.kind(a)) {
    case ArcKind::SourceToDest:
      return "s" + from + "_d" + to + "_" + t;
    case ArcKind::DestSelf:
      return "d" + from + "_" + t;
    case ArcKind::DestToSource:
      return "d" + from + "_s" + to + "_" + t;
    case ArcKind::SourceSelf:
      return "s" + from + "k" + std::to_string(teg.to(a) + 1) + "_" + t;
  }
  return "?";
}

class Builder {
 public:
  Builder(const Instance& inst, const TimeExpandedGraph& teg, ModelVariant variant, const StorageFlow* fixed)
      : inst_(inst), teg_(teg), fixed_(fixed), cap_(inst.storage_capacity), horizon_(inst.horizon) {
    out_.variant = variant;
    init_ = initial_flow(inst, teg);
  }

  BuiltModel build() {
    make_arc_slots();
    auto& lay = out_.layout;
    const int nd = teg_.destination_count(), ns = teg_.source_count();
    lay.z_first.resize(nd * horizon_);
    lay.z_second.resize(nd * horizon_);
    lay.kept_stock.resize(nd * horizon_);
    lay.min_first.assign(nd * horizon_, -1);
    lay.min_second.assign(nd * horizon_, -1);
    lay.unmet.assign(nd * horizon_, -1);
    lay.refill.assign(ns * horizon_, -1);
    lay.assignment.resize(ns * horizon_);

    if (!subproblem()) {
      add_initial_rows();
      add_coupling();
      add_presence();
    }
    for (int j = 1; j <= horizon_; ++j) {
      for (int s = 0; s < ns; ++s) add_source(s, j);
      for (int d = 0; d < nd; ++d) add_destination(d, j);
    }
    add_objective();
    return std::move(out_);
  }

 private:
  bool subproblem() const { return out_.variant == ModelVariant::RefillSubproblem; }
  MilpModel& m() { return out_.milp; }
  LinExpr y(ArcId a) const { return out_.layout.y[a].expr(); }
  LinExpr f(ArcId a) const { return out_.layout.f[a].expr(); }
  bool on(ArcId a) const { return !fixed_ || (*fixed_)[a]; }

  void make_arc_slots() {
    auto& lay = out_.layout;
    lay.y.resize(teg_.arc_count());
    lay.f.resize(teg_.arc_count());
    for (ArcId a = 0; a < teg_.arc_count(); ++a) {
      const std::string name = arc_name(teg_, a);
      if (!subproblem()) {
        lay.y[a].var = m().add_binary("y_" + name);
        lay.f[a].var = m().add_continuous("f_" + name, 0.0, cap_);
        continue;
      }
      lay.y[a].value = (*fixed_)[a];
      if (teg_.day(a).value() == 0)
        lay.f[a].value = init_.f[a];
      else if ((*fixed_)[a])
        lay.f[a].var = m().add_continuous("f_" + name, 0.0, cap_);
    }
  }

  void add_initial_rows() {
    LinExpr count;
    for (ArcId a : teg_.arcs_at(TimeIndex::initial())) {
      const std::string name = arc_name(teg_, a);
      m().add_constraint("init_y_" + name, y(a), Sense::Equal, init_.y[a]);
      m().add_constraint("init_f_" + name, f(a), Sense::Equal, init_.f[a]);
      count += y(a);
    }
    m().add_constraint("init_count", count, Sense::Equal, inst_.storage_count());
  }

  void add_coupling() {
    for (ArcId a = 0; a < teg_.arc_count(); ++a)
      linearize_implication(m(), "cpl_" + arc_name(teg_, a), f(a), y(a), cap_);
  }

  void add_presence() {
    for (int t = 0; t < teg_.layer_count(); ++t)
      for (int d = 0; d < teg_.destination_count(); ++d) {
        const ArcId a = teg_.dest_self(d, TimeIndex(t));
        m().add_constraint("present_" + arc_name(teg_, a), y(a), Sense::Equal, 1.0);
      }
  }

  void add_destination(int d, int j) {
    auto& lay = out_.layout;
    const int k = day_index(d, j, horizon_);
    const TimeIndex L = TimeIndex::first_part(j), R = TimeIndex::second_part(j), P(2 * j - 2);
    const ArcId a_prev = teg_.dest_self(d, P), a_first = teg_.dest_self(d, L), a_second = teg_.dest_self(d, R);
    const std::string tag = "_d" + std::to_string(d) + "_" + std::to_string(j);
    const double c12 = cumulative_demand(inst_, d, j, kNoSwapHour);
    const double c23 = daily_demand(inst_, d, j);

    LinExpr deliveries, first_demand(c12), returns, returned_f, delivered_f;
    for (int s = 0; s < teg_.source_count(); ++s) {
      const ArcId in = teg_.source_to_dest(s, d, L);
      const double cw = cumulative_demand(inst_, d, j, inst_.transport.swap_hour(s, d));
      deliveries += y(in);
      first_demand += (cw - c12) * y(in);
      delivered_f += f(in);
      const ArcId back = teg_.dest_to_source(d, s, R);
      returns += y(back);
      returned_f += f(back);
    }

    const VarId zl = m().add_continuous("zL" + tag, 0.0, cap_);
    lay.z_first[k].var = zl;
    m().add_constraint("stock_first" + tag, f(a_first), Sense::Equal, f(a_prev) - LinExpr::var(zl));
    lay.min_first[k] = linearize_min(m(), "minL" + tag, LinExpr::var(zl), f(a_prev), first_demand, cap_);
    m().add_constraint("one_delivery" + tag, deliveries, Sense::LessEqual, 1.0);
    m().add_constraint("swap_return" + tag, deliveries, Sense::Equal, returns);

    const LinExpr keep_flag = LinExpr(1.0) - deliveries;
    LinExpr kept;
    if (keep_flag.is_constant()) {
      kept = keep_flag.constant() * f(a_first);
    } else {
      kept = LinExpr::var(linearize_product(m(), "keep" + tag, keep_flag, f(a_first), cap_));
    }
    lay.kept_stock[k] = kept;
    m().add_constraint("swap_out" + tag, f(a_first), Sense::Equal, kept + returned_f);

    const VarId zr = m().add_continuous("zR" + tag, 0.0, cap_);
    lay.z_second[k].var = zr;
    const LinExpr serving = delivered_f + kept;
    m().add_constraint("stock_second" + tag, f(a_second), Sense::Equal, serving - LinExpr::var(zr));
    lay.min_second[k] = linearize_min(m(), "minR" + tag, LinExpr::var(zr), serving, LinExpr(c23) - first_demand, cap_);

    const VarId u = m().add_binary("u" + tag);
    lay.unmet[k] = u;
    m().add_constraint("unmet" + tag, LinExpr(c23) - LinExpr::var(zl) - LinExpr::var(zr), Sense::LessEqual,
                       std::min(cap_, c23) * LinExpr::var(u));
  }

  void add_source(int s, int j) {
    auto& lay = out_.layout;
    const int k = day_index(s, j, horizon_);
    const TimeIndex L = TimeIndex::first_part(j), R = TimeIndex::second_part(j);
    const std::string tag = "_s" + std::to_string(s) + "_" + std::to_string(j);
    const auto in_arcs = assignment_inflow_arcs(teg_, s, j);
    const auto out_arcs = assignment_outflow_arcs(teg_, s, j);

    LinExpr in_y, out_y, in_f, out_f;
    for (ArcId a : in_arcs) {
      in_y += y(a);
      in_f += f(a);
    }
    for (ArcId a : out_arcs) {
      out_y += y(a);
      out_f += f(a);
    }
    m().add_constraint("capacity" + tag, in_y, Sense::LessEqual, teg_.slot_limit(s));
    m().add_constraint("conserve" + tag, in_y, Sense::Equal, out_y);
    const VarId r = m().add_continuous("r" + tag, 0.0, inst_.sources[s].refill_capacity);
    lay.refill[k] = r;
    m().add_constraint("hydrogen" + tag, in_f + LinExpr::var(r), Sense::Equal, out_f);

    if (out_.variant != ModelVariant::Relaxed) {
      std::vector<LinExpr> fi, fo, yi, yo;
      std::vector<char> ai, ao;
      for (std::size_t n = 0; n < in_arcs.size(); ++n) {
        fi.push_back(f(in_arcs[n]));
        fo.push_back(f(out_arcs[n]));
        yi.push_back(y(in_arcs[n]));
        yo.push_back(y(out_arcs[n]));
        ai.push_back(on(in_arcs[n]));
        ao.push_back(on(out_arcs[n]));
      }
      lay.assignment[k] = linearize_assignment(m(), "pair" + tag, fi, fo, yi, yo, cap_, ai, ao);
    }

    for (int slot = 0; slot + 1 < teg_.slot_limit(s); ++slot)
      m().add_constraint("order" + tag + "_" + std::to_string(slot + 1), y(teg_.source_self(s, slot + 1, L)),
                         Sense::LessEqual, y(teg_.source_self(s, slot, L)));
    for (int slot = 0; slot < teg_.slot_limit(s); ++slot) {
      const ArcId a = teg_.source_self(s, slot, L), b = teg_.source_self(s, slot, R);
      const std::string t = tag + "_" + std::to_string(slot + 1);
      m().add_constraint("carry_f" + t, f(a), Sense::Equal, f(b));
      m().add_constraint("carry_y" + t, y(a), Sense::Equal, y(b));
    }
  }

  void add_objective() {
    const auto& lay = out_.layout;
    LinExpr obj;
    if (!subproblem()) {
      for (ArcId a = 0; a < teg_.arc_count(); ++a) {
        if (teg_.kind(a) == ArcKind::SourceToDest)
          obj += inst_.cost.transport * inst_.transport.distance[teg_.from(a)][teg_.to(a)] * y(a);
        else if (teg_.kind(a) == ArcKind::DestToSource)
          obj += inst_.cost.transport * inst_.transport.distance[teg_.to(a)][teg_.from(a)] * y(a);
      }
    }
    for (int s = 0; s < teg_.source_count(); ++s)
      for (int j = 1; j <= horizon_; ++j)
        obj += inst_.sources[s].refill_price * LinExpr::var(lay.refill[day_index(s, j, horizon_)]);
    for (int d = 0; d < teg_.destination_count(); ++d)
      for (int j = 1; j <= horizon_; ++j) {
        const int k = day_index(d, j, horizon_);
        obj += inst_.cost.variable_dissatisfaction *
               (LinExpr(daily_demand(inst_, d, j)) - lay.z_first[k].expr() - lay.z_second[k].expr());
        obj += inst_.cost.fixed_dissatisfaction * LinExpr::var(lay.unmet[k]);
      }
    m().add_objective(obj);
  }

  const Instance& inst_;
  const TimeExpandedGraph& teg_;
  const StorageFlow* fixed_;
  double cap_;
  int horizon_;
  InitialFlow init_;
  BuiltModel out_;
};

}  // namespace

const char* to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::Full:
      return "full";
    case ModelVariant::Relaxed:
      return "relaxed";
    case ModelVariant::RefillSubproblem:
      return "refill-subproblem";
  }
  return "?";
}

InitialFlow initial_flow(const Instance& inst, const TimeExpandedGraph& teg) {
  InitialFlow init;
  init.y.assign(teg.arc_count(), 0);
  init.f.assign(teg.arc_count(), 0.0);
  const TimeIndex t0 = TimeIndex::initial();
  for (int d = 0; d < teg.destination_count(); ++d) {
    const ArcId a = teg.dest_self(d, t0);
    init.y[a] = 1;
    init.f[a] = inst.destinations[d].initial_stock;
  }
  for (int s = 0; s < teg.source_count(); ++s) {
    const auto& stocks = inst.sources[s].initial_storages;
    for (std::size_t k = 0; k < stocks.size() && static_cast<int>(k) < teg.slot_limit(s); ++k) {
      const ArcId a = teg.source_self(s, static_cast<int>(k), t0);
      init.y[a] = 1;
      init.f[a] = stocks[k];
    }
  }
  return init;
}

std::vector<ArcId> assignment_inflow_arcs(const TimeExpandedGraph& teg, int s, int day) {
  const TimeIndex prev(2 * day - 2);
  std::vector<ArcId> arcs;
  for (int d = 0; d < teg.destination_count(); ++d) arcs.push_back(teg.dest_to_source(d, s, prev));
  for (int k = 0; k < teg.slot_limit(s); ++k) arcs.push_back(teg.source_self(s, k, prev));
  return arcs;
}

std::vector<ArcId> assignment_outflow_arcs(const TimeExpandedGraph& teg, int s, int day) {
  const TimeIndex first = TimeIndex::first_part(day);
  std::vector<ArcId> arcs;
  for (int d = 0; d < teg.destination_count(); ++d) arcs.push_back(teg.source_to_dest(s, d, first));
  for (int k = 0; k < teg.slot_limit(s); ++k) arcs.push_back(teg.source_self(s, k, first));
  return arcs;
}

RoutingError::RoutingError(std::vector<RoutingViolation> violations)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "storage flow breaks the routing constraints:";
        for (std::size_t i = 0; i < violations.size() && i < 5; ++i)
          os << " [" << violations[i].rule << "] " << violations[i].detail << ";";
        if (violations.size() > 5) os << " ... " << violations.size() - 5 << " more";
        return os.str();
      }()),
      violations_(std::move(violations)) {}

std::vector<RoutingViolation> check_routing(const Instance& inst, const TimeExpandedGraph& teg,
                                            const StorageFlow& y) {
  std::vector<RoutingViolation> out;
  if (static_cast<int>(y.size()) != teg.arc_count()) {
    out.push_back({"binary", "storage flow has " + std::to_string(y.size()) + " entries for " +
                                 std::to_string(teg.arc_count()) + " arcs"});
    return out;
  }
  auto add = [&](const char* rule, std::string detail) { out.push_back({rule, std::move(detail)}); };
  for (ArcId a = 0; a < teg.arc_count(); ++a)
    if (y[a] > 1) add("binary", "arc " + teg.label(a) + " is not 0/1");

  const InitialFlow init = initial_flow(inst, teg);
  for (ArcId a : teg.arcs_at(TimeIndex::initial()))
    if (y[a] != init.y[a]) add("initial-placement", "arc " + teg.label(a) + " differs from the initial placement");

  for (int t = 0; t < teg.layer_count(); ++t)
    for (int d = 0; d < teg.destination_count(); ++d) {
      const ArcId a = teg.dest_self(d, TimeIndex(t));
      if (y[a] != 1) add("destination-presence", "arc " + teg.label(a) + " is empty");
    }

  for (int j = 1; j <= teg.horizon(); ++j) {
    const TimeIndex L = TimeIndex::first_part(j), R = TimeIndex::second_part(j);
    const std::string day = " on day " + std::to_string(j);
    for (int d = 0; d < teg.destination_count(); ++d) {
      int in = 0, back = 0;
      for (int s = 0; s < teg.source_count(); ++s) {
        in += y[teg.source_to_dest(s, d, L)];
        back += y[teg.dest_to_source(d, s, R)];
      }
      if (in > 1) add("single-delivery", "destination " + std::to_string(d) + " receives " + std::to_string(in) + day);
      if (in != back)
        add("swap-return", "destination " + std::to_string(d) + " receives " + std::to_string(in) + " and returns " +
                               std::to_string(back) + day);
    }
    for (int s = 0; s < teg.source_count(); ++s) {
      int in = 0, out = 0;
      for (ArcId a : assignment_inflow_arcs(teg, s, j)) in += y[a];
      for (ArcId a : assignment_outflow_arcs(teg, s, j)) out += y[a];
      const std::string who = "source " + std::to_string(s);
      if (in > teg.slot_limit(s))
        add("source-capacity", who + " holds " + std::to_string(in) + " storages" + day);
      if (in != out)
        add("source-conservation", who + " receives " + std::to_string(in) + " but sends " + std::to_string(out) + day);
      for (int k = 0; k + 1 < teg.slot_limit(s); ++k)
        if (y[teg.source_self(s, k + 1, L)] > y[teg.source_self(s, k, L)])
          add("slot-order", who + " fills slot " + std::to_string(k + 2) + " before slot " + std::to_string(k + 1) + day);
      for (int k = 0; k < teg.slot_limit(s); ++k)
        if (y[teg.source_self(s, k, L)] != y[teg.source_self(s, k, R)])
          add("afternoon-carry", who + " changes slot " + std::to_string(k + 1) + " during" + day);
    }
  }
  return out;
}

BuiltModel build_full_model(const Instance& inst, const TimeExpandedGraph& teg) {
  return Builder(inst, teg, ModelVariant::Full, nullptr).build();
}

BuiltModel build_relaxed_model(const Instance& inst, const TimeExpandedGraph& teg) {
  return Builder(inst, teg, ModelVariant::Relaxed, nullptr).build();
}

BuiltModel build_refill_subproblem(const Instance& inst, const TimeExpandedGraph& teg, const StorageFlow& y) {
  auto violations = check_routing(inst, teg, y);
  if (!violations.empty()) throw RoutingError(std::move(violations));
  return Builder(inst, teg, ModelVariant::RefillSubproblem, &y).build();
}

int swap_hour(const Instance& inst, const TimeExpandedGraph& teg, const StorageFlow& y, int d, int day) {
  const TimeIndex L = TimeIndex::first_part(day);
  for (int s = 0; s < teg.source_count(); ++s)
    if (y[teg.source_to_dest(s, d, L)]) return inst.transport.swap_hour(s, d);
  return kNoSwapHour;
}

double first_part_demand(const Instance& inst, const TimeExpandedGraph& teg, const StorageFlow& y, int d, int day) {
  return cumulative_demand(inst, d, day, swap_hour(inst, teg, y, d, day));
}

double unmet_demand(const Instance& inst, const FlowSolution& sol, int d, int day) {
  const int k = day_index(d, day, inst.horizon);
  return std::max(0.0, daily_demand(inst, d, day) - sol.z_first[k] - sol.z_second[k]);
}

double total_unmet_demand(const Instance& inst, const FlowSolution& sol) {
  double total = 0.0;
  for (int d = 0; d < inst.destination_count(); ++d)
    for (int j = 1; j <= inst.horizon; ++j) total += unmet_demand(inst, sol, d, j);
  return total;
}

CostBreakdown evaluate_cost(const Instance& inst, const TimeExpandedGraph& teg, const FlowSolution& sol) {
  if (static_cast<int>(sol.y.size()) != teg.arc_count() ||
      static_cast<int>(sol.z_first.size()) != inst.destination_count() * inst.horizon ||
      static_cast<int>(sol.z_second.size()) != inst.destination_count() * inst.horizon ||
      static_cast<int>(sol.refill.size()) != inst.source_count() * inst.horizon)
    throw std::invalid_argument("solution is missing values");
  CostBreakdown c;
  for (ArcId a = 0; a < teg.arc_count(); ++a) {
    if (!sol.y[a]) continue;
    if (teg.kind(a) == ArcKind::SourceToDest)
      c.transport += inst.cost.transport * inst.transport.distance[teg.from(a)][teg.to(a)];
    else if (teg.kind(a) == ArcKind::DestToSource)
      c.transport += inst.cost.transport * inst.transport.distance[teg.to(a)][teg.from(a)];
  }
  for (int s = 0; s < inst.source_count(); ++s)
    for (int j = 1; j <= inst.horizon; ++j)
      c.refill += inst.sources[s].refill_price * sol.refill[day_index(s, j, inst.horizon)];
  for (int d = 0; d < inst.destination_count(); ++d)
    for (int j = 1; j <= inst.horizon; ++j) {
      const int k = day_index(d, j, inst.horizon);
      const double unmet = daily_demand(inst, d, j) - sol.z_first[k] - sol.z_second[k];
      c.variable_dissatisfaction += inst.cost.variable_dissatisfaction * unmet;
      if (unmet > kUnmetTolerance) c.fixed_dissatisfaction += inst.cost.fixed_dissatisfaction;
    }
  return c;
}

FlowSolution extract_solution(const Instance& inst, const TimeExpandedGraph& teg, const BuiltModel& model,
                              std::span<const double> x) {
  const auto& lay = model.layout;
  FlowSolution sol;
  sol.y.resize(teg.arc_count());
  sol.f.resize(teg.arc_count());
  for (ArcId a = 0; a < teg.arc_count(); ++a) {
    sol.y[a] = lay.y[a].eval(x) > 0.5 ? 1 : 0;
    sol.f[a] = sol.y[a] ? std::clamp(lay.f[a].eval(x), 0.0, inst.storage_capacity) : 0.0;
  }
  const int nd = inst.destination_count(), ns = inst.source_count(), horizon = inst.horizon;
  sol.z_first.resize(nd * horizon);
  sol.z_second.resize(nd * horizon);
  sol.unmet_flag.resize(nd * horizon);
  for (int k = 0; k < nd * horizon; ++k) {
    sol.z_first[k] = lay.z_first[k].eval(x);
    sol.z_second[k] = lay.z_second[k].eval(x);
  }
  for (int d = 0; d < nd; ++d)
    for (int j = 1; j <= horizon; ++j)
      sol.unmet_flag[day_index(d, j, horizon)] = unmet_demand(inst, sol, d, j) > kUnmetTolerance;
  sol.refill.resize(ns * horizon);
  sol.sigma.resize(ns * horizon);
  for (int k = 0; k < ns * horizon; ++k) {
    sol.refill[k] = std::max(0.0, x[lay.refill[k]]);
    const AssignmentVars& asg = lay.assignment[k];
    if (asg.size == 0) continue;
    sol.sigma[k].assign(asg.size, -1);
    for (int n = 0; n < asg.size; ++n)
      for (int mm = 0; mm < asg.size; ++mm) {
        const VarId b = asg.at(n, mm);
        if (b >= 0 && x[b] > 0.5) sol.sigma[k][n] = mm;
      }
  }
  sol.cost = evaluate_cost(inst, teg, sol);
  return sol;
}

std::vector<double> model_point(const Instance& inst, const TimeExpandedGraph& teg, const BuiltModel& built,
                                const FlowSolution& sol) {
  const auto& lay = built.layout;
  std::vector<double> x(built.milp.variable_count(), 0.0);
  for (ArcId a = 0; a < teg.arc_count(); ++a) {
    if (lay.y[a].var >= 0) x[lay.y[a].var] = sol.y[a];
    if (lay.f[a].var >= 0) x[lay.f[a].var] = sol.f[a];
  }
  const int horizon = inst.horizon;
  for (int d = 0; d < inst.destination_count(); ++d)
    for (int j = 1; j <= horizon; ++j) {
      const int k = day_index(d, j, horizon);
      const TimeIndex L = TimeIndex::first_part(j), P(2 * j - 2);
      x[lay.z_first[k].var] = sol.z_first[k];
      x[lay.z_second[k].var] = sol.z_second[k];
      int delivered = 0;
      double delivered_f = 0.0;
      for (int s = 0; s < teg.source_count(); ++s) {
        const ArcId a = teg.source_to_dest(s, d, L);
        delivered += sol.y[a];
        delivered_f += sol.f[a];
      }
      const double kept = (1 - delivered) * sol.f[teg.dest_self(d, L)];
      if (built.variant != ModelVariant::RefillSubproblem) x[lay.kept_stock[k].terms().front().var] = kept;
      const double first_demand = first_part_demand(inst, teg, sol.y, d, j);
      const double second_demand = daily_demand(inst, d, j) - first_demand;
      x[lay.min_first[k]] = first_demand <= sol.f[teg.dest_self(d, P)] ? 1.0 : 0.0;
      x[lay.min_second[k]] = second_demand <= delivered_f + kept ? 1.0 : 0.0;
      x[lay.unmet[k]] = sol.unmet_flag[k];
    }
  for (int k = 0; k < inst.source_count() * horizon; ++k) {
    x[lay.refill[k]] = sol.refill[k];
    const AssignmentVars& asg = lay.assignment[k];
    if (asg.size == 0) continue;
    if (sol.sigma.size() <= static_cast<std::size_t>(k) || sol.sigma[k].empty())
      throw std::invalid_argument("solution carries no source pairing");
    for (int n = 0; n < asg.size; ++n) {
      if (sol.sigma[k][n] < 0) continue;
      const VarId b = asg.at(n, sol.sigma[k][n]);
      if (b < 0) throw std::invalid_argument("solution pairs storages the model cannot pair");
      x[b] = 1.0;
    }
  }
  return x;
}

std::vector<double> full_model_point(const Instance& inst, const TimeExpandedGraph& teg, const BuiltModel& full,
                                     const FlowSolution& sol) {
  if (full.variant != ModelVariant::Full) throw std::invalid_argument("full_model_point needs the full model");
  return model_point(inst, teg, full, sol);
}

FlowSolution simulate_refills(const Instance& inst, const TimeExpandedGraph& teg, const StorageFlow& y) {
  auto violations = check_routing(inst, teg, y);
  if (!violations.empty()) throw RoutingError(std::move(violations));
  const int nd = inst.destination_count(), ns = inst.source_count(), horizon = inst.horizon;
  const double cap = inst.storage_capacity;
  const InitialFlow init = initial_flow(inst, teg);

  FlowSolution sol;
  sol.y = y;
  sol.f = init.f;
  sol.z_first.assign(nd * horizon, 0.0);
  sol.z_second.assign(nd * horizon, 0.0);
  sol.unmet_flag.assign(nd * horizon, 0);
  sol.refill.assign(ns * horizon, 0.0);
  sol.sigma.assign(ns * horizon, {});

  for (int j = 1; j <= horizon; ++j) {
    const TimeIndex L = TimeIndex::first_part(j), R = TimeIndex::second_part(j), P(2 * j - 2);
    for (int s = 0; s < ns; ++s) {
      const int k = day_index(s, j, horizon);
      const auto in_arcs = assignment_inflow_arcs(teg, s, j);
      const auto out_arcs = assignment_outflow_arcs(teg, s, j);
      std::vector<int> arrivals, departures, parked;
      for (int n = 0; n < static_cast<int>(in_arcs.size()); ++n)
        if (y[in_arcs[n]]) arrivals.push_back(n);
      for (int n = 0; n < static_cast<int>(out_arcs.size()); ++n) {
        if (!y[out_arcs[n]]) continue;
        (n < nd ? departures : parked).push_back(n);
      }
      std::stable_sort(arrivals.begin(), arrivals.end(),
                       [&](int a, int b) { return sol.f[in_arcs[a]] > sol.f[in_arcs[b]]; });
      double budget = inst.sources[s].refill_capacity;
      sol.sigma[k].assign(in_arcs.size(), -1);
      std::size_t next = 0;
      for (int out : departures) {
        const int from = arrivals[next++];
        const double have = sol.f[in_arcs[from]];
        const double top = std::min(cap - have, budget);
        budget -= top;
        sol.refill[k] += top;
        sol.f[out_arcs[out]] = have + top;
        sol.sigma[k][from] = out;
      }
      for (int out : parked) {
        const int from = arrivals[next++];
        sol.f[out_arcs[out]] = sol.f[in_arcs[from]];
        sol.sigma[k][from] = out;
      }
      for (int slot = 0; slot < teg.slot_limit(s); ++slot)
        sol.f[teg.source_self(s, slot, R)] = sol.f[teg.source_self(s, slot, L)];
    }
    for (int d = 0; d < nd; ++d) {
      const int k = day_index(d, j, horizon);
      const double stock = sol.f[teg.dest_self(d, P)];
      const double first_demand = first_part_demand(inst, teg, y, d, j);
      const double second_demand = daily_demand(inst, d, j) - first_demand;
      sol.z_first[k] = std::min(stock, first_demand);
      const double left = stock - sol.z_first[k];
      sol.f[teg.dest_self(d, L)] = left;
      double serving = left;
      for (int s = 0; s < ns; ++s) {
        if (!y[teg.source_to_dest(s, d, L)]) continue;
        serving = sol.f[teg.source_to_dest(s, d, L)];
        for (int back = 0; back < ns; ++back)
          if (y[teg.dest_to_source(d, back, R)]) sol.f[teg.dest_to_source(d, back, R)] = left;
      }
      sol.z_second[k] = std::min(serving, second_demand);
      sol.f[teg.dest_self(d, R)] = serving - sol.z_second[k];
      sol.unmet_flag[k] = unmet_demand(inst, sol, d, j) > kUnmetTolerance;
    }
  }
  sol.cost = evaluate_cost(inst, teg, sol);
  return sol;
}

}  // namespace prpmi
