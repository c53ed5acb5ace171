#include "prpmi/planning.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace prpmi {

std::vector<int> extend_bijection(const std::vector<int>& sigma, const std::vector<std::uint8_t>& y_in,
                                  const std::vector<std::uint8_t>& y_out) {
  const std::size_t n = y_in.size();
  if (y_out.size() != n) throw DecodeError("assignment vectors differ in length");
  if (!sigma.empty() && sigma.size() != n) throw DecodeError("pairing has the wrong length");
  std::vector<int> in_on, in_off, out_on, out_off;
  for (std::size_t l = 0; l < n; ++l) {
    (y_in[l] ? in_on : in_off).push_back(static_cast<int>(l));
    (y_out[l] ? out_on : out_off).push_back(static_cast<int>(l));
  }
  if (in_on.size() != out_on.size())
    throw DecodeError(std::to_string(in_on.size()) + " storages arrive but " + std::to_string(out_on.size()) +
                      " leave");

  std::vector<int> bar(n, -1);
  std::vector<char> taken(n, 0);
  if (!sigma.empty()) {
    for (int l : in_on) {
      const int m = sigma[l];
      if (m < 0 || m >= static_cast<int>(n) || !y_out[m] || taken[m])
        throw DecodeError("pairing of arriving entry " + std::to_string(l) + " is not a bijection onto departures");
      bar[l] = m;
      taken[m] = 1;
    }
  } else {
    for (std::size_t i = 0; i < in_on.size(); ++i) bar[in_on[i]] = out_on[i];
  }
  for (std::size_t i = 0; i < in_off.size(); ++i) bar[in_off[i]] = out_off[i];
  return bar;
}

namespace {

void check_size(const TimeExpandedGraph& teg, const FlowSolution& sol) {
  if (static_cast<int>(sol.y.size()) != teg.arc_count())
    throw DecodeError("storage flow has " + std::to_string(sol.y.size()) + " entries for " +
                      std::to_string(teg.arc_count()) + " arcs");
}

int position_in_layer(const TimeExpandedGraph& teg, ArcId a) {
  const auto layer = teg.arcs_at(teg.day(a));
  return static_cast<int>(a - layer.front());
}

std::vector<std::uint8_t> pick(const StorageFlow& y, const std::vector<ArcId>& arcs) {
  std::vector<std::uint8_t> v;
  v.reserve(arcs.size());
  for (ArcId a : arcs) v.push_back(y[a] ? 1 : 0);
  return v;
}

}  // namespace

std::vector<ArcId> theta_under(const TimeExpandedGraph& teg, const FlowSolution& sol, int day) {
  check_size(teg, sol);
  const int horizon = teg.horizon();
  if (day < 1 || day > horizon) throw std::out_of_range("day out of range");
  const TimeIndex prev(2 * day - 2), first = TimeIndex::first_part(day);
  const int nd = teg.destination_count();
  const auto layer = teg.arcs_at(prev);
  std::vector<ArcId> map(layer.size(), -1);

  for (int d = 0; d < nd; ++d) map[position_in_layer(teg, teg.dest_self(d, prev))] = teg.dest_self(d, first);
  for (int s = 0; s < teg.source_count(); ++s) {
    const auto in = assignment_inflow_arcs(teg, s, day);
    const auto out = assignment_outflow_arcs(teg, s, day);
    const std::size_t k = static_cast<std::size_t>(s) * horizon + day - 1;
    static const std::vector<int> none;
    const std::vector<int>& sigma = k < sol.sigma.size() ? sol.sigma[k] : none;
    std::vector<int> bar;
    try {
      bar = extend_bijection(sigma, pick(sol.y, in), pick(sol.y, out));
    } catch (const DecodeError& e) {
      throw DecodeError("source conservation at s" + std::to_string(s) + ", " + first.label(horizon) + ": " +
                        e.what());
    }
    for (std::size_t l = 0; l < in.size(); ++l) map[position_in_layer(teg, in[l])] = out[bar[l]];
  }
  return map;
}

std::vector<ArcId> theta_over(const TimeExpandedGraph& teg, const FlowSolution& sol, int day) {
  check_size(teg, sol);
  const int horizon = teg.horizon();
  if (day < 1 || day > horizon) throw std::out_of_range("day out of range");
  const TimeIndex first = TimeIndex::first_part(day), second = TimeIndex::second_part(day);
  const int ns = teg.source_count(), nd = teg.destination_count();
  const auto& y = sol.y;
  const auto layer = teg.arcs_at(first);
  std::vector<ArcId> map(layer.size(), -1);

  for (int s = 0; s < ns; ++s)
    for (int k = 0; k < teg.slot_limit(s); ++k)
      map[position_in_layer(teg, teg.source_self(s, k, first))] = teg.source_self(s, k, second);

  for (int d = 0; d < nd; ++d) {
    int delivered_by = -1, returned_to = -1;
    for (int s = 0; s < ns; ++s) {
      if (y[teg.source_to_dest(s, d, first)]) {
        if (delivered_by >= 0) throw DecodeError("two deliveries to d" + std::to_string(d) + " at " + first.label(horizon));
        delivered_by = s;
      }
      if (y[teg.dest_to_source(d, s, second)]) {
        if (returned_to >= 0) throw DecodeError("two returns from d" + std::to_string(d) + " at " + second.label(horizon));
        returned_to = s;
      }
    }
    if ((delivered_by >= 0) != (returned_to >= 0))
      throw DecodeError("swap at d" + std::to_string(d) + " on day " + std::to_string(day) +
                        " has a delivery without a return or a return without a delivery");
    const ArcId stay = teg.dest_self(d, first);
    std::vector<int> from_free, to_free;
    for (int s = 0; s < ns; ++s) {
      if (s != delivered_by) from_free.push_back(s);
      if (s != returned_to) to_free.push_back(s);
    }
    if (delivered_by >= 0) {
      map[position_in_layer(teg, teg.source_to_dest(delivered_by, d, first))] = teg.dest_self(d, second);
      map[position_in_layer(teg, stay)] = teg.dest_to_source(d, returned_to, second);
    } else {
      map[position_in_layer(teg, stay)] = teg.dest_self(d, second);
    }
    for (std::size_t i = 0; i < from_free.size(); ++i)
      map[position_in_layer(teg, teg.source_to_dest(from_free[i], d, first))] =
          teg.dest_to_source(d, to_free[i], second);
  }
  return map;
}

std::vector<int> check_flow_count(const TimeExpandedGraph& teg, const StorageFlow& y) {
  std::vector<int> counts(teg.layer_count(), 0);
  for (int t = 0; t < teg.layer_count(); ++t)
    for (ArcId a : teg.arcs_at(TimeIndex(t)))
      if (a < static_cast<ArcId>(y.size()) && y[a]) ++counts[t];
  return counts;
}

std::vector<TransportPlan> derive_transport_plans(const TimeExpandedGraph& teg, const FlowSolution& sol) {
  check_size(teg, sol);
  const int horizon = teg.horizon();
  std::vector<TransportPlan> plans;
  for (ArcId a : teg.arcs_at(TimeIndex::initial()))
    if (sol.y[a]) plans.push_back({static_cast<int>(plans.size()), {a}});

  for (int t = 1; t < teg.layer_count(); ++t) {
    const TimeIndex now(t);
    const auto map = now.is_first_part() ? theta_under(teg, sol, now.day()) : theta_over(teg, sol, now.day());
    for (auto& plan : plans) {
      const ArcId last = plan.arcs.back();
      const ArcId next = map[position_in_layer(teg, last)];
      if (!sol.y[next])
        throw DecodeError("flow is not preserved at " + teg.label(last) + " -> " + teg.label(next) +
                          " (storage " + std::to_string(plan.storage) + " at " + now.label(horizon) + ")");
      plan.arcs.push_back(next);
    }
  }
  return plans;
}

PlanCheck check_plans(const TimeExpandedGraph& teg, const StorageFlow& y, const std::vector<TransportPlan>& plans) {
  PlanCheck c;
  std::vector<int> owner(teg.arc_count(), -1);
  for (const auto& p : plans) {
    if (static_cast<int>(p.arcs.size()) != teg.layer_count()) {
      c.paths = false;
      c.detail = "plan " + std::to_string(p.storage) + " has " + std::to_string(p.arcs.size()) + " arcs";
    }
    for (std::size_t i = 0; i < p.arcs.size(); ++i) {
      const ArcId a = p.arcs[i];
      if (teg.day(a).value() != static_cast<int>(i) || !y[a]) {
        c.paths = false;
        c.detail = "plan " + std::to_string(p.storage) + " uses " + teg.label(a);
      }
      if (i > 0 && !(teg.head(p.arcs[i - 1]) == teg.tail(a))) {
        c.paths = false;
        c.detail = "plan " + std::to_string(p.storage) + " breaks between " + teg.label(p.arcs[i - 1]) + " and " +
                   teg.label(a);
      }
      if (owner[a] >= 0) {
        c.disjoint = false;
        c.detail = teg.label(a) + " is used by storages " + std::to_string(owner[a]) + " and " +
                   std::to_string(p.storage);
      }
      owner[a] = p.storage;
    }
  }
  for (ArcId a = 0; a < teg.arc_count(); ++a)
    if (y[a] && owner[a] < 0) {
      c.cover = false;
      c.detail = teg.label(a) + " carries a storage but no plan uses it";
    }
  return c;
}

Location plan_location(const TimeExpandedGraph& teg, ArcId a) { return teg.tail(a).location; }

void write_plans_csv(std::ostream& os, const Instance& inst, const TimeExpandedGraph& teg, const FlowSolution& sol,
                     const std::vector<TransportPlan>& plans) {
  os << "storage_id,time,location,carried_kg\n";
  char kg[64];
  for (const auto& p : plans)
    for (ArcId a : p.arcs) {
      const Location loc = plan_location(teg, a);
      const std::string where = loc.is_source() ? "s" + std::to_string(inst.sources[loc.index].id)
                                                : "d" + std::to_string(inst.destinations[loc.index].id);
      std::snprintf(kg, sizeof kg, "%.6f", a < static_cast<ArcId>(sol.f.size()) ? sol.f[a] : 0.0);
      os << p.storage << ',' << teg.day(a).label(teg.horizon()) << ',' << where << ',' << kg << '\n';
    }
}

void save_plans_csv(const std::filesystem::path& path, const Instance& inst, const TimeExpandedGraph& teg,
                    const FlowSolution& sol, const std::vector<TransportPlan>& plans) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_plans_csv(out, inst, teg, sol, plans);
}

}  // namespace prpmi
