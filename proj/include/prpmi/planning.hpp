#pragma once

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "prpmi/model.hpp"
#include "prpmi/teg.hpp"

namespace prpmi {

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TransportPlan {
  int storage = 0;
  std::vector<ArcId> arcs;  // one per time index 0..2J
};

// Total bijection over the entries of a source assignment. Entries paired by
// sigma keep their partner; the remaining inactive inflows go to the remaining
// inactive outflows in ascending order. An empty sigma pairs the active entries
// in ascending order too. Throws DecodeError when the active counts differ.
std::vector<int> extend_bijection(const std::vector<int>& sigma, const std::vector<std::uint8_t>& y_in,
                                  const std::vector<std::uint8_t>& y_out);

// Arc maps between consecutive layers, as vectors indexed by position in
// arcs_at(from) and holding arc ids of the next layer.
// theta_under maps the arcs of R_{j-1} onto those of Lj, theta_over the arcs of
// Lj onto those of Rj.
std::vector<ArcId> theta_under(const TimeExpandedGraph& teg, const FlowSolution& sol, int day);
std::vector<ArcId> theta_over(const TimeExpandedGraph& teg, const FlowSolution& sol, int day);

// One plan per storage, seeded at the active arcs of R0 in arc order.
std::vector<TransportPlan> derive_transport_plans(const TimeExpandedGraph& teg, const FlowSolution& sol);

// Active storage flows per time index 0..2J.
std::vector<int> check_flow_count(const TimeExpandedGraph& teg, const StorageFlow& y);

struct PlanCheck {
  bool paths = true;     // consecutive arcs meet and carry a storage
  bool disjoint = true;  // no arc in two plans
  bool cover = true;     // every active arc in some plan
  std::string detail;
  bool ok() const { return paths && disjoint && cover; }
};

PlanCheck check_plans(const TimeExpandedGraph& teg, const StorageFlow& y, const std::vector<TransportPlan>& plans);

// Location of the storage at the start of each time index: the tail of its arc.
Location plan_location(const TimeExpandedGraph& teg, ArcId a);

void write_plans_csv(std::ostream& os, const Instance& inst, const TimeExpandedGraph& teg, const FlowSolution& sol,
                     const std::vector<TransportPlan>& plans);
void save_plans_csv(const std::filesystem::path& path, const Instance& inst, const TimeExpandedGraph& teg,
                    const FlowSolution& sol, const std::vector<TransportPlan>& plans);

}  // namespace prpmi
