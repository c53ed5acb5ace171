#include "prpmi/teg.hpp"

#include <sstream>

namespace prpmi {

std::string TimeIndex::label(int horizon) const {
  if (value_ == 2 * horizon + 1) return "T";
  if (value_ == 0) return "R0";
  return (is_first_part() ? "L" : "R") + std::to_string(day());
}

TimeIndex succ(TimeIndex i, int horizon) {
  if (i.value() < 0 || i.value() > 2 * horizon)
    throw std::out_of_range("time index " + std::to_string(i.value()) + " has no successor");
  return TimeIndex(i.value() + 1);
}

TimeIndex pred(TimeIndex i) {
  if (i.value() <= 0) throw NoPredecessorError("R0 has no predecessor");
  return TimeIndex(i.value() - 1);
}

const char* to_string(ArcKind kind) {
  switch (kind) {
    case ArcKind::SourceToDest:
      return "source_to_dest";
    case ArcKind::DestSelf:
      return "dest_self";
    case ArcKind::DestToSource:
      return "dest_to_source";
    case ArcKind::SourceSelf:
      return "source_self";
  }
  return "?";
}

TimeExpandedGraph::TimeExpandedGraph(const Instance& inst)
    : horizon_(inst.horizon), ns_(inst.source_count()), nd_(inst.destination_count()) {
  if (horizon_ < 0) throw std::invalid_argument("negative horizon");
  slots_.reserve(ns_);
  slot_offset_.assign(ns_ + 1, 0);
  for (int s = 0; s < ns_; ++s) {
    slots_.push_back(inst.sources[s].slot_limit);
    slot_offset_[s + 1] = slot_offset_[s] + slots_[s];
  }

  const int layers = layer_count();
  time_start_.assign(layers + 1, 0);
  first_part_offset_.assign(layers, -1);
  return_offset_.assign(layers, -1);
  dest_self_offset_.assign(layers, -1);
  source_self_offset_.assign(layers, -1);
  for (int t = 0; t < layers; ++t) {
    time_start_[t] = arc_count();
    if (TimeIndex(t).is_first_part()) {
      first_part_offset_[t] = arc_count();
      for (int s = 0; s < ns_; ++s)
        for (int d = 0; d < nd_; ++d) add_arc(ArcKind::SourceToDest, s, d, t);
    } else {
      return_offset_[t] = arc_count();
      for (int d = 0; d < nd_; ++d)
        for (int s = 0; s < ns_; ++s) add_arc(ArcKind::DestToSource, d, s, t);
    }
    dest_self_offset_[t] = arc_count();
    for (int d = 0; d < nd_; ++d) add_arc(ArcKind::DestSelf, d, d, t);
    source_self_offset_[t] = arc_count();
    for (int s = 0; s < ns_; ++s)
      for (int k = 0; k < slots_[s]; ++k) add_arc(ArcKind::SourceSelf, s, k, t);
  }
  time_start_[layers] = arc_count();
  ids_.resize(arc_count());
  for (ArcId a = 0; a < arc_count(); ++a) ids_[a] = a;

  const int nodes = node_count();
  std::vector<int> out_deg(nodes, 0), in_deg(nodes, 0);
  for (ArcId a = 0; a < arc_count(); ++a) {
    ++out_deg[node_id(tail(a))];
    ++in_deg[node_id(head(a))];
  }
  out_start_.assign(nodes + 1, 0);
  in_start_.assign(nodes + 1, 0);
  for (int n = 0; n < nodes; ++n) {
    out_start_[n + 1] = out_start_[n] + out_deg[n];
    in_start_[n + 1] = in_start_[n] + in_deg[n];
  }
  out_arcs_.resize(arc_count());
  in_arcs_.resize(arc_count());
  std::vector<int> out_fill(out_start_.begin(), out_start_.end() - 1);
  std::vector<int> in_fill(in_start_.begin(), in_start_.end() - 1);
  for (ArcId a = 0; a < arc_count(); ++a) {
    out_arcs_[out_fill[node_id(tail(a))]++] = a;
    in_arcs_[in_fill[node_id(head(a))]++] = a;
  }
}

ArcId TimeExpandedGraph::add_arc(ArcKind kind, int from, int to, int time) {
  kind_.push_back(kind);
  from_.push_back(from);
  to_.push_back(to);
  time_.push_back(time);
  return static_cast<ArcId>(kind_.size()) - 1;
}

void TimeExpandedGraph::check_time(TimeIndex t) const {
  if (t.value() < 0 || t.value() >= layer_count())
    throw std::out_of_range("time index " + std::to_string(t.value()) + " outside the graph");
}

NodeRef TimeExpandedGraph::tail(ArcId a) const {
  const TimeIndex t(time_[a]);
  switch (kind_[a]) {
    case ArcKind::SourceToDest:
    case ArcKind::SourceSelf:
      return {{Location::Kind::Source, from_[a]}, t};
    default:
      return {{Location::Kind::Destination, from_[a]}, t};
  }
}

NodeRef TimeExpandedGraph::head(ArcId a) const {
  const TimeIndex t(time_[a] + 1);
  switch (kind_[a]) {
    case ArcKind::SourceToDest:
      return {{Location::Kind::Destination, to_[a]}, t};
    case ArcKind::DestSelf:
      return {{Location::Kind::Destination, from_[a]}, t};
    case ArcKind::DestToSource:
      return {{Location::Kind::Source, to_[a]}, t};
    case ArcKind::SourceSelf:
      return {{Location::Kind::Source, from_[a]}, t};
  }
  throw std::logic_error("unknown arc kind");
}

ArcId TimeExpandedGraph::source_to_dest(int s, int d, TimeIndex t) const {
  check_time(t);
  if (!t.is_first_part()) throw std::out_of_range("source-to-destination arcs leave first parts only");
  if (s < 0 || s >= ns_ || d < 0 || d >= nd_) throw std::out_of_range("bad source or destination");
  return first_part_offset_[t.value()] + s * nd_ + d;
}

ArcId TimeExpandedGraph::dest_to_source(int d, int s, TimeIndex t) const {
  check_time(t);
  if (!t.is_second_part()) throw std::out_of_range("destination-to-source arcs leave second parts only");
  if (s < 0 || s >= ns_ || d < 0 || d >= nd_) throw std::out_of_range("bad source or destination");
  return return_offset_[t.value()] + d * ns_ + s;
}

ArcId TimeExpandedGraph::dest_self(int d, TimeIndex t) const {
  check_time(t);
  if (d < 0 || d >= nd_) throw std::out_of_range("bad destination");
  return dest_self_offset_[t.value()] + d;
}

ArcId TimeExpandedGraph::source_self(int s, int k, TimeIndex t) const {
  check_time(t);
  if (s < 0 || s >= ns_ || k < 0 || k >= slots_[s]) throw std::out_of_range("bad source slot");
  return source_self_offset_[t.value()] + slot_offset_[s] + k;
}

std::span<const ArcId> TimeExpandedGraph::arcs_at(TimeIndex t) const {
  check_time(t);
  return {ids_.data() + time_start_[t.value()],
          static_cast<std::size_t>(time_start_[t.value() + 1] - time_start_[t.value()])};
}

NodeId TimeExpandedGraph::node_id(NodeRef n) const {
  const int loc = n.location.is_source() ? n.location.index : ns_ + n.location.index;
  return n.time.value() * (ns_ + nd_) + loc;
}

NodeRef TimeExpandedGraph::node(NodeId id) const {
  const int width = ns_ + nd_;
  const int loc = id % width;
  const TimeIndex t(id / width);
  if (loc < ns_) return {{Location::Kind::Source, loc}, t};
  return {{Location::Kind::Destination, loc - ns_}, t};
}

std::span<const ArcId> TimeExpandedGraph::outgoing(NodeId n) const {
  return {out_arcs_.data() + out_start_[n], static_cast<std::size_t>(out_start_[n + 1] - out_start_[n])};
}

std::span<const ArcId> TimeExpandedGraph::incoming(NodeId n) const {
  return {in_arcs_.data() + in_start_[n], static_cast<std::size_t>(in_start_[n + 1] - in_start_[n])};
}

int TimeExpandedGraph::count(ArcKind kind) const {
  int n = 0;
  for (ArcKind k : kind_) n += k == kind;
  return n;
}

int TimeExpandedGraph::count_under() const {
  int n = 0;
  for (ArcId a = 0; a < arc_count(); ++a)
    n += kind_[a] == ArcKind::SourceToDest || (kind_[a] == ArcKind::DestSelf && day(a).is_first_part());
  return n;
}

int TimeExpandedGraph::count_over() const {
  int n = 0;
  for (ArcId a = 0; a < arc_count(); ++a)
    n += kind_[a] == ArcKind::DestToSource || (kind_[a] == ArcKind::DestSelf && day(a).is_second_part());
  return n;
}

int TimeExpandedGraph::count_self() const { return count(ArcKind::SourceSelf); }

std::string TimeExpandedGraph::label(ArcId a) const {
  const std::string t = day(a).label(horizon_);
  switch (kind_[a]) {
    case ArcKind::SourceToDest:
      return "(s" + std::to_string(from_[a]) + ",d" + std::to_string(to_[a]) + "," + t + ")";
    case ArcKind::DestSelf:
      return "(d" + std::to_string(from_[a]) + ",d" + std::to_string(from_[a]) + "," + t + ")";
    case ArcKind::DestToSource:
      return "(d" + std::to_string(from_[a]) + ",s" + std::to_string(to_[a]) + "," + t + ")";
    case ArcKind::SourceSelf:
      return "(s" + std::to_string(from_[a]) + ":" + std::to_string(to_[a] + 1) + "," + t + ")";
  }
  return "?";
}

std::string TimeExpandedGraph::to_dot() const {
  std::ostringstream os;
  auto name = [&](NodeRef n) {
    std::ostringstream s;
    s << '"' << '(' << (n.location.is_source() ? 's' : 'd') << n.location.index << ", "
      << n.time.label(horizon_) << ")\"";
    return s.str();
  };
  os << "digraph teg {\n  rankdir=LR;\n";
  for (int t = 0; t <= layer_count(); ++t) {
    os << "  { rank=same;";
    for (int s = 0; s < ns_; ++s) os << ' ' << name({{Location::Kind::Source, s}, TimeIndex(t)});
    for (int d = 0; d < nd_; ++d) os << ' ' << name({{Location::Kind::Destination, d}, TimeIndex(t)});
    os << " }\n";
  }
  for (ArcId a = 0; a < arc_count(); ++a) {
    const char* color = "blue";
    if (kind_[a] == ArcKind::SourceToDest || (kind_[a] == ArcKind::DestSelf && day(a).is_first_part()))
      color = "green";
    else if (kind_[a] != ArcKind::SourceSelf)
      color = "orange";
    os << "  " << name(tail(a)) << " -> " << name(head(a)) << " [color=" << color;
    if (kind_[a] == ArcKind::SourceSelf) os << ", label=\"" << from_[a] << ':' << to_[a] + 1 << '"';
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace prpmi
