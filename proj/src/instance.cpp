#include "prpmi/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace prpmi {

using nlohmann::json;

int Instance::storage_count() const {
  int n = destination_count();
  for (const auto& s : sources) n += static_cast<int>(s.initial_storages.size());
  return n;
}

int Instance::total_slots() const {
  int n = 0;
  for (const auto& s : sources) n += s.slot_limit;
  return n;
}

double cumulative_demand(const Instance& inst, int d, int day, int hour) {
  if (d < 0 || d >= inst.destination_count())
    throw std::out_of_range("destination index " + std::to_string(d) + " out of range");
  if (day < 1 || day > inst.horizon)
    throw std::out_of_range("day " + std::to_string(day) + " outside [1, horizon]");
  if (hour < 0 || hour >= kHoursPerDay)
    throw std::out_of_range("hour " + std::to_string(hour) + " outside [0, 23]");
  const DayDemand& q = inst.destinations[d].hourly_demand.at(day - 1);
  double c = 0.0;
  for (int h = 0; h <= hour; ++h) c += q[h];
  return c;
}

double daily_demand(const Instance& inst, int d, int day) {
  return cumulative_demand(inst, d, day, kHoursPerDay - 1);
}

int travel_hours_for(double distance) {
  return std::max(1, static_cast<int>(std::ceil(distance / kTruckSpeed)));
}

int min_destinations(int n_sources) {
  return static_cast<int>(std::ceil(4.33 * n_sources - 1e-9));
}

int max_destinations(int n_sources) {
  return static_cast<int>(std::floor(8.5 * n_sources + 1e-9));
}

double weekday_scale(int day) {
  switch ((day - 1) % 7) {
    case 5:
      return 0.5;
    case 6:
      return 0.25;
    default:
      return 1.0;
  }
}

DayDemand demand_profile(double magnitude) {
  constexpr std::array<std::pair<int, double>, 3> peaks{{{8, 1.0}, {14, 2.0 / 3.0}, {17, 1.0 / 3.0}}};
  constexpr double half_width = 3.0;
  DayDemand raw{};
  for (int h = 0; h < kHoursPerDay; ++h)
    for (auto [center, weight] : peaks)
      raw[h] += weight * std::max(0.0, 1.0 - std::abs(h - center) / half_width);
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  DayDemand q{};
  for (int h = 0; h < kHoursPerDay; ++h) q[h] = magnitude * raw[h] / total;
  return q;
}

namespace {

void check_range(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

std::vector<DayDemand> weekly_demand(double magnitude, int horizon) {
  const DayDemand base = demand_profile(magnitude);
  std::vector<DayDemand> days(horizon);
  for (int j = 1; j <= horizon; ++j) {
    const double scale = weekday_scale(j);
    for (int h = 0; h < kHoursPerDay; ++h) days[j - 1][h] = base[h] * scale;
  }
  return days;
}

void draw_distances(Instance& inst, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dist(kMinDistance, kMaxDistance);
  const int ns = inst.source_count(), nd = inst.destination_count();
  inst.transport.distance.assign(ns, std::vector<double>(nd));
  inst.transport.travel_time.assign(ns, std::vector<int>(nd));
  for (int s = 0; s < ns; ++s)
    for (int d = 0; d < nd; ++d) {
      const int km = dist(rng);
      inst.transport.distance[s][d] = km;
      inst.transport.travel_time[s][d] = travel_hours_for(km);
    }
}

}  // namespace

Instance generate_instance(const GenerationSpec& spec) {
  check_range(spec.n_sources >= 1 && spec.n_sources <= 7, "n_sources must lie in [1, 7]");
  check_range(spec.dest_ratio >= 4.33 && spec.dest_ratio <= 8.5, "dest_ratio must lie in [4.33, 8.5]");
  check_range(spec.storage_ratio >= 1.26 && spec.storage_ratio <= 1.5,
              "storage_ratio must lie in [1.26, 1.5]");
  check_range(spec.demand_magnitude == 85.0 || spec.demand_magnitude == 130.0,
              "demand_magnitude must be 85 or 130");
  check_range(spec.dissatisfaction == kLowDissatisfaction || spec.dissatisfaction == kHighDissatisfaction,
              "dissatisfaction profile must be (12, 1500) or (14, 2500)");
  check_range(spec.horizon >= 0, "horizon must be nonnegative");

  const int ns = spec.n_sources;
  int nd = spec.destinations > 0 ? spec.destinations
                                 : static_cast<int>(std::lround(ns * spec.dest_ratio));
  check_range(spec.destinations <= 0 ||
                  (nd >= min_destinations(ns) && nd <= max_destinations(ns)),
              "destination count incompatible with the number of sources");
  nd = std::clamp(nd, min_destinations(ns), max_destinations(ns));

  int nb = static_cast<int>(std::lround(spec.storage_ratio * nd));
  nb = std::clamp(nb, static_cast<int>(std::ceil(1.26 * nd - 1e-9)),
                  static_cast<int>(std::floor(1.5 * nd + 1e-9)));
  nb = std::min(nb, nd + kGeneratedSlotLimit * ns);

  Instance inst;
  inst.horizon = spec.horizon;
  inst.storage_capacity = kGeneratedCapacity;
  inst.cost = CostSpec{2.25, spec.dissatisfaction.variable, spec.dissatisfaction.fixed};
  inst.transport.depart_hour = 8;
  inst.transport.load_hours = 0;
  inst.transport.swap_hours = 1;

  for (int s = 0; s < ns; ++s) {
    SourceSpec src;
    src.id = s;
    src.refill_capacity = kSourceTable[s].capacity;
    src.refill_price = kSourceTable[s].price;
    src.slot_limit = kGeneratedSlotLimit;
    inst.sources.push_back(src);
  }
  for (int k = 0; k < nb - nd; ++k)
    inst.sources[k % ns].initial_storages.push_back(kGeneratedInitialStock);

  const auto demand = weekly_demand(spec.demand_magnitude, spec.horizon);
  for (int d = 0; d < nd; ++d)
    inst.destinations.push_back(DestinationSpec{d, demand, kGeneratedInitialStock});

  std::mt19937_64 rng(spec.seed);
  draw_distances(inst, rng);
  return inst;
}

Instance make_small_instance(const SmallInstanceSpec& spec) {
  check_range(spec.sources >= 1 && spec.sources <= static_cast<int>(kSourceTable.size()),
              "sources must lie in [1, 7]");
  check_range(spec.destinations >= 1, "destinations must be positive");
  check_range(spec.horizon >= 0, "horizon must be nonnegative");
  check_range(spec.demand_low >= 0.0 && spec.demand_low <= spec.demand_high, "bad demand range");

  Instance inst;
  inst.horizon = spec.horizon;
  inst.storage_capacity = spec.storage_capacity;
  inst.cost = CostSpec{2.25, kLowDissatisfaction.variable, kLowDissatisfaction.fixed};
  for (int s = 0; s < spec.sources; ++s) {
    SourceSpec src;
    src.id = s;
    src.refill_capacity = spec.refill_capacity;
    src.refill_price = kSourceTable[s].price;
    src.slot_limit = spec.slot_limit;
    const int extra = s < static_cast<int>(spec.storages_at_source.size()) ? spec.storages_at_source[s] : 0;
    src.initial_storages.assign(extra, spec.initial_stock);
    inst.sources.push_back(src);
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> magnitude(spec.demand_low, spec.demand_high);
  for (int d = 0; d < spec.destinations; ++d) {
    const double m = std::round(magnitude(rng));
    std::vector<DayDemand> days(spec.horizon, demand_profile(m));
    inst.destinations.push_back(DestinationSpec{d, days, spec.initial_stock});
  }
  draw_distances(inst, rng);
  return inst;
}

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "instance violates its invariants:";
        for (const auto& v : violations) os << " [" << v.assumption << "] " << v.message << ";";
        return os.str();
      }()),
      violations_(std::move(violations)) {}

std::vector<Violation> validate_instance(const Instance& inst) {
  std::vector<Violation> out;
  auto add = [&](std::string tag, std::string msg) { out.push_back({std::move(tag), std::move(msg)}); };
  const double cap = inst.storage_capacity;
  const int ns = inst.source_count(), nd = inst.destination_count();

  if (inst.horizon < 0) add("horizon", "horizon is negative");
  if (!(cap > 0.0)) add("A1", "storage capacity must be positive");
  if (ns == 0) add("structure", "no sources");
  if (nd == 0) add("structure", "no destinations");
  if (inst.cost.transport < 0 || inst.cost.variable_dissatisfaction < 0 || inst.cost.fixed_dissatisfaction < 0)
    add("cost", "cost coefficients must be nonnegative");

  for (int s = 0; s < ns; ++s) {
    const auto& src = inst.sources[s];
    const std::string who = "source " + std::to_string(s);
    if (src.id != s) add("structure", who + " has id " + std::to_string(src.id));
    if (src.refill_capacity < 0 || src.refill_price < 0) add("cost", who + " has a negative refill capacity or price");
    if (src.slot_limit < 1) add("A6", who + " has no storage slot");
    if (static_cast<int>(src.initial_storages.size()) > src.slot_limit)
      add("A6", who + " holds " + std::to_string(src.initial_storages.size()) + " storages but admits " +
                    std::to_string(src.slot_limit));
    for (double v : src.initial_storages)
      if (v < 0 || v > cap) add("A1", who + " has an initial stock outside [0, capacity]");
  }

  for (int d = 0; d < nd; ++d) {
    const auto& dst = inst.destinations[d];
    const std::string who = "destination " + std::to_string(d);
    if (dst.id != d) add("structure", who + " has id " + std::to_string(dst.id));
    if (dst.initial_stock < 0 || dst.initial_stock > cap) add("A1", who + " has an initial stock outside [0, capacity]");
    if (static_cast<int>(dst.hourly_demand.size()) != inst.horizon) {
      add("structure", who + " has " + std::to_string(dst.hourly_demand.size()) + " demand rows for horizon " +
                           std::to_string(inst.horizon));
      continue;
    }
    for (int j = 0; j < inst.horizon; ++j) {
      double total = 0.0;
      for (double q : dst.hourly_demand[j]) {
        if (q < 0) add("demand", who + " has negative demand on day " + std::to_string(j + 1));
        total += q;
      }
      if (total > cap + 1e-9)
        add("A2", who + " needs " + std::to_string(total) + " kg on day " + std::to_string(j + 1) +
                      ", more than one storage holds");
    }
  }

  const auto& tr = inst.transport;
  const bool shaped = static_cast<int>(tr.travel_time.size()) == ns &&
                      static_cast<int>(tr.distance.size()) == ns &&
                      std::all_of(tr.travel_time.begin(), tr.travel_time.end(),
                                  [&](const auto& row) { return static_cast<int>(row.size()) == nd; }) &&
                      std::all_of(tr.distance.begin(), tr.distance.end(),
                                  [&](const auto& row) { return static_cast<int>(row.size()) == nd; });
  if (!shaped) {
    add("structure", "transport matrices must be sources x destinations");
  } else {
    if (tr.load_hours < 0 || tr.swap_hours < 0) add("A5", "load and swap durations must be nonnegative");
    for (int s = 0; s < ns; ++s)
      for (int d = 0; d < nd; ++d) {
        if (tr.travel_time[s][d] < 1) add("A5", "travel time below one hour");
        if (tr.distance[s][d] < 0) add("cost", "negative distance");
        if (tr.swap_hour(s, d) > kHoursPerDay - 1)
          add("A5", "trip from source " + std::to_string(s) + " to destination " + std::to_string(d) +
                        " does not finish within the day");
      }
  }
  return out;
}

nlohmann::json instance_to_json(const Instance& inst) {
  json doc;
  doc["format"] = "prpmi-instance";
  doc["schema_version"] = kInstanceSchemaVersion;
  doc["horizon"] = inst.horizon;
  doc["storage_capacity"] = inst.storage_capacity;
  doc["cost"] = {{"transport", inst.cost.transport},
                 {"variable_dissatisfaction", inst.cost.variable_dissatisfaction},
                 {"fixed_dissatisfaction", inst.cost.fixed_dissatisfaction}};
  doc["transport"] = {{"depart_hour", inst.transport.depart_hour},
                      {"load_hours", inst.transport.load_hours},
                      {"swap_hours", inst.transport.swap_hours},
                      {"distance", inst.transport.distance},
                      {"travel_time", inst.transport.travel_time}};
  json sources = json::array();
  for (const auto& s : inst.sources)
    sources.push_back({{"id", s.id},
                       {"refill_capacity", s.refill_capacity},
                       {"refill_price", s.refill_price},
                       {"slot_limit", s.slot_limit},
                       {"initial_storages", s.initial_storages}});
  doc["sources"] = std::move(sources);
  json dests = json::array();
  for (const auto& d : inst.destinations)
    dests.push_back({{"id", d.id}, {"initial_stock", d.initial_stock}, {"hourly_demand", d.hourly_demand}});
  doc["destinations"] = std::move(dests);
  return doc;
}

namespace {

const json& field(const json& obj, const std::string& key, const std::string& path) {
  const std::string where = path.empty() ? key : path + "." + key;
  if (!obj.is_object()) throw SchemaError(path, "'" + path + "' must be an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where, "missing field '" + where + "'");
  return *it;
}

template <typename T>
T read(const json& obj, const std::string& key, const std::string& path) {
  const json& v = field(obj, key, path);
  const std::string where = path.empty() ? key : path + "." + key;
  try {
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw SchemaError(where, "field '" + where + "' must be an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw SchemaError(where, "field '" + where + "' must be a number");
    }
    return v.get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(where, "field '" + where + "' has the wrong type: " + e.what());
  }
}

const json& array_field(const json& obj, const std::string& key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_array()) {
    const std::string where = path.empty() ? key : path + "." + key;
    throw SchemaError(where, "field '" + where + "' must be an array");
  }
  return v;
}

}  // namespace

Instance instance_from_json(const nlohmann::json& doc, bool validate) {
  Instance inst;
  inst.horizon = read<int>(doc, "horizon", "");
  inst.storage_capacity = read<double>(doc, "storage_capacity", "");
  const json& cost = field(doc, "cost", "");
  inst.cost.transport = read<double>(cost, "transport", "cost");
  inst.cost.variable_dissatisfaction = read<double>(cost, "variable_dissatisfaction", "cost");
  inst.cost.fixed_dissatisfaction = read<double>(cost, "fixed_dissatisfaction", "cost");
  const json& tr = field(doc, "transport", "");
  inst.transport.depart_hour = read<int>(tr, "depart_hour", "transport");
  inst.transport.load_hours = read<int>(tr, "load_hours", "transport");
  inst.transport.swap_hours = read<int>(tr, "swap_hours", "transport");
  inst.transport.distance = read<std::vector<std::vector<double>>>(tr, "distance", "transport");
  inst.transport.travel_time = read<std::vector<std::vector<int>>>(tr, "travel_time", "transport");

  const json& sources = array_field(doc, "sources", "");
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const std::string path = "sources[" + std::to_string(i) + "]";
    SourceSpec s;
    s.id = read<int>(sources[i], "id", path);
    s.refill_capacity = read<double>(sources[i], "refill_capacity", path);
    s.refill_price = read<double>(sources[i], "refill_price", path);
    s.slot_limit = read<int>(sources[i], "slot_limit", path);
    s.initial_storages = read<std::vector<double>>(sources[i], "initial_storages", path);
    inst.sources.push_back(std::move(s));
  }
  const json& dests = array_field(doc, "destinations", "");
  for (std::size_t i = 0; i < dests.size(); ++i) {
    const std::string path = "destinations[" + std::to_string(i) + "]";
    DestinationSpec d;
    d.id = read<int>(dests[i], "id", path);
    d.initial_stock = read<double>(dests[i], "initial_stock", path);
    const json& rows = array_field(dests[i], "hourly_demand", path);
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const std::string where = path + ".hourly_demand[" + std::to_string(j) + "]";
      if (!rows[j].is_array() || rows[j].size() != kHoursPerDay)
        throw SchemaError(where, "'" + where + "' must hold 24 hourly values");
      DayDemand q{};
      for (int h = 0; h < kHoursPerDay; ++h) {
        if (!rows[j][h].is_number()) throw SchemaError(where, "'" + where + "' must hold numbers");
        q[h] = rows[j][h].get<double>();
      }
      d.hourly_demand.push_back(q);
    }
    inst.destinations.push_back(std::move(d));
  }

  if (validate) {
    auto violations = validate_instance(inst);
    if (!violations.empty()) throw ValidationError(std::move(violations));
  }
  return inst;
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file " + path.string());
  out << instance_to_json(inst).dump(1) << '\n';
  if (!out) throw std::runtime_error("failed writing instance file " + path.string());
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read instance file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("instance file is not valid JSON: ") + e.what());
  }
  return instance_from_json(doc);
}

}  // namespace prpmi
