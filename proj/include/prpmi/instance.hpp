#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace prpmi {

inline constexpr int kHoursPerDay = 24;
// Hour used for the demand split when a destination receives no delivery.
inline constexpr int kNoSwapHour = 12;

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct SourceSpec {
  int id = 0;
  double refill_capacity = 0.0;  // kg per day
  double refill_price = 0.0;     // per kg
  int slot_limit = 0;
  std::vector<double> initial_storages;  // kg in each storage parked here at R0

  bool operator==(const SourceSpec&) const = default;
};

using DayDemand = std::array<double, kHoursPerDay>;

struct DestinationSpec {
  int id = 0;
  std::vector<DayDemand> hourly_demand;  // one row per day 1..J
  double initial_stock = 0.0;

  bool operator==(const DestinationSpec&) const = default;
};

// Matrices are symmetric in direction and indexed [source][destination].
// distance is the costed unit of a trip; travel_time is its duration in hours.
struct TransportSpec {
  std::vector<std::vector<double>> distance;
  std::vector<std::vector<int>> travel_time;
  int load_hours = 0;
  int swap_hours = 1;
  int depart_hour = 8;

  int trip_hours(int s, int d) const {
    return load_hours + travel_time.at(s).at(d) + swap_hours;
  }
  int swap_hour(int s, int d) const { return depart_hour + trip_hours(s, d); }

  bool operator==(const TransportSpec&) const = default;
};

struct CostSpec {
  double transport = 2.25;
  double variable_dissatisfaction = 12.0;
  double fixed_dissatisfaction = 1500.0;

  bool operator==(const CostSpec&) const = default;
};

struct Instance {
  std::vector<SourceSpec> sources;
  std::vector<DestinationSpec> destinations;
  int horizon = 7;
  double storage_capacity = 300.0;
  CostSpec cost;
  TransportSpec transport;

  int source_count() const { return static_cast<int>(sources.size()); }
  int destination_count() const { return static_cast<int>(destinations.size()); }
  int storage_count() const;
  int total_slots() const;

  bool operator==(const Instance&) const = default;
};

// C_{d,j,h}: demand of day j (1-based) accumulated from midnight up to hour h.
double cumulative_demand(const Instance& inst, int d, int day, int hour);
double daily_demand(const Instance& inst, int d, int day);

struct DissatisfactionProfile {
  double variable = 12.0;
  double fixed = 1500.0;
  bool operator==(const DissatisfactionProfile&) const = default;
};

inline constexpr DissatisfactionProfile kLowDissatisfaction{12.0, 1500.0};
inline constexpr DissatisfactionProfile kHighDissatisfaction{14.0, 2500.0};

struct GenerationSpec {
  int n_sources = 1;
  double dest_ratio = 4.33;
  double storage_ratio = 1.26;
  double demand_magnitude = 85.0;
  DissatisfactionProfile dissatisfaction = kLowDissatisfaction;
  std::uint64_t seed = 0;
  int horizon = 7;
  // When positive, overrides the ratio-derived destination count.
  int destinations = 0;
};

struct SourceTableRow {
  double capacity;
  double price;
};
inline constexpr std::array<SourceTableRow, 7> kSourceTable{{
    {1300.0, 9.0},
    {1500.0, 8.0},
    {1700.0, 8.3},
    {1000.0, 8.0},
    {1000.0, 8.0},
    {800.0, 10.0},
    {500.0, 7.0},
}};

inline constexpr double kGeneratedCapacity = 300.0;
inline constexpr double kGeneratedInitialStock = 200.0;
inline constexpr int kGeneratedSlotLimit = 4;
inline constexpr int kMinDistance = 1;
inline constexpr int kMaxDistance = 123;
inline constexpr double kTruckSpeed = 40.0;  // km per hour

int travel_hours_for(double distance);

// Destination count range admitted for a given number of sources.
int min_destinations(int n_sources);
int max_destinations(int n_sources);

// Relative demand of a weekday (day 1 is a Monday): 1, 0.5 on Saturday, 0.25 on Sunday.
double weekday_scale(int day);
DayDemand demand_profile(double magnitude);

Instance generate_instance(const GenerationSpec& spec);

// Small instances for tests and oracle checks; every knob is explicit.
struct SmallInstanceSpec {
  int sources = 1;
  int destinations = 2;
  std::vector<int> storages_at_source;  // extra storages per source
  int slot_limit = 2;
  int horizon = 2;
  // Each destination draws its daily demand uniformly in [low, high].
  double demand_low = 100.0;
  double demand_high = 250.0;
  double initial_stock = 200.0;
  double refill_capacity = 400.0;
  double storage_capacity = 300.0;
  std::uint64_t seed = 0;
};
Instance make_small_instance(const SmallInstanceSpec& spec);

struct Violation {
  std::string assumption;
  std::string message;
};

std::vector<Violation> validate_instance(const Instance& inst);

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

inline constexpr int kInstanceSchemaVersion = 1;

nlohmann::json instance_to_json(const Instance& inst);
// Throws SchemaError on structural problems and ValidationError on broken invariants.
Instance instance_from_json(const nlohmann::json& doc, bool validate = true);

void save_instance(const Instance& inst, const std::filesystem::path& path);
Instance load_instance(const std::filesystem::path& path);

}  // namespace prpmi
