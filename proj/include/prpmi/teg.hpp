#pragma once

#include <compare>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "prpmi/instance.hpp"

namespace prpmi {

// Time layers are numbered 0 = R0, 2j-1 = Lj, 2j = Rj; 2J+1 is the virtual
// terminal that follows RJ.
class TimeIndex {
 public:
  constexpr TimeIndex() = default;
  constexpr explicit TimeIndex(int value) : value_(value) {}

  static constexpr TimeIndex initial() { return TimeIndex(0); }
  static constexpr TimeIndex first_part(int day) { return TimeIndex(2 * day - 1); }
  static constexpr TimeIndex second_part(int day) { return TimeIndex(2 * day); }
  static constexpr TimeIndex terminal(int horizon) { return TimeIndex(2 * horizon + 1); }

  constexpr int value() const { return value_; }
  constexpr bool is_first_part() const { return value_ % 2 == 1; }
  constexpr bool is_second_part() const { return value_ % 2 == 0; }
  // Day j of Lj and Rj; 0 for R0.
  constexpr int day() const { return (value_ + 1) / 2; }

  std::string label(int horizon) const;

  constexpr auto operator<=>(const TimeIndex&) const = default;

 private:
  int value_ = 0;
};

class NoPredecessorError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

TimeIndex succ(TimeIndex i, int horizon);
TimeIndex pred(TimeIndex i);

enum class ArcKind : unsigned char { SourceToDest, DestSelf, DestToSource, SourceSelf };

const char* to_string(ArcKind kind);

struct Location {
  enum class Kind : unsigned char { Source, Destination };
  Kind kind = Kind::Source;
  int index = 0;

  bool is_source() const { return kind == Kind::Source; }
  bool operator==(const Location&) const = default;
};

struct NodeRef {
  Location location;
  TimeIndex time;
  bool operator==(const NodeRef&) const = default;
};

using ArcId = int;
using NodeId = int;

class TimeExpandedGraph {
 public:
  explicit TimeExpandedGraph(const Instance& inst);

  int horizon() const { return horizon_; }
  int source_count() const { return ns_; }
  int destination_count() const { return nd_; }
  int slot_limit(int s) const { return slots_[s]; }
  int layer_count() const { return 2 * horizon_ + 1; }

  int arc_count() const { return static_cast<int>(kind_.size()); }
  ArcKind kind(ArcId a) const { return kind_[a]; }
  // Source index for source arcs, destination index for destination arcs;
  // for SourceToDest this is s, for DestToSource it is d.
  int from(ArcId a) const { return from_[a]; }
  // Destination for SourceToDest, source for DestToSource, slot for SourceSelf,
  // the destination itself for DestSelf.
  int to(ArcId a) const { return to_[a]; }
  TimeIndex day(ArcId a) const { return TimeIndex(time_[a]); }
  NodeRef tail(ArcId a) const;
  NodeRef head(ArcId a) const;

  ArcId source_to_dest(int s, int d, TimeIndex t) const;
  ArcId dest_to_source(int d, int s, TimeIndex t) const;
  ArcId dest_self(int d, TimeIndex t) const;
  ArcId source_self(int s, int k, TimeIndex t) const;

  std::span<const ArcId> arcs_at(TimeIndex t) const;

  int node_count() const { return (layer_count() + 1) * (ns_ + nd_); }
  NodeId node_id(NodeRef n) const;
  NodeRef node(NodeId id) const;
  std::span<const ArcId> outgoing(NodeId n) const;
  std::span<const ArcId> incoming(NodeId n) const;

  int count(ArcKind kind) const;
  int count_under() const;  // source-to-destination and destination arcs of first parts
  int count_over() const;   // destination-to-source and destination arcs of second parts
  int count_self() const;   // source slot arcs

  std::string label(ArcId a) const;
  std::string to_dot() const;

 private:
  ArcId add_arc(ArcKind kind, int from, int to, int time);
  void check_time(TimeIndex t) const;

  int horizon_;
  int ns_;
  int nd_;
  std::vector<int> slots_;
  std::vector<int> slot_offset_;

  std::vector<ArcKind> kind_;
  std::vector<int> from_;
  std::vector<int> to_;
  std::vector<int> time_;
  std::vector<ArcId> ids_;
  std::vector<int> time_start_;

  std::vector<int> first_part_offset_;   // per time: first SourceToDest arc or -1
  std::vector<int> dest_self_offset_;
  std::vector<int> return_offset_;       // per time: first DestToSource arc or -1
  std::vector<int> source_self_offset_;

  std::vector<int> out_start_, in_start_;
  std::vector<ArcId> out_arcs_, in_arcs_;
};

}  // namespace prpmi
