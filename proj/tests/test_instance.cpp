#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "prpmi/instance.hpp"
#include "support.hpp"

using namespace prpmi;

namespace {

bool has_violation(const Instance& inst, const std::string& tag) {
  const auto v = validate_instance(inst);
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.assumption == tag; });
}

}  // namespace

TEST_SUITE("instance") {

TEST_CASE("source table rows") {
  GenerationSpec spec;
  spec.n_sources = 1;
  const Instance inst = generate_instance(spec);
  REQUIRE(inst.source_count() == 1);
  CHECK(inst.sources[0].refill_capacity == 1300.0);
  CHECK(inst.sources[0].refill_price == 9.0);

  spec.n_sources = 7;
  const Instance seven = generate_instance(spec);
  const double caps[] = {1300, 1500, 1700, 1000, 1000, 800, 500};
  const double prices[] = {9.0, 8.0, 8.3, 8.0, 8.0, 10.0, 7.0};
  for (int s = 0; s < 7; ++s) {
    CHECK(seven.sources[s].refill_capacity == caps[s]);
    CHECK(seven.sources[s].refill_price == prices[s]);
  }
}

TEST_CASE("generated constants") {
  for (int ns = 1; ns <= 7; ++ns) {
    GenerationSpec spec;
    spec.n_sources = ns;
    spec.seed = 40 + ns;
    const Instance inst = generate_instance(spec);
    CHECK(inst.storage_capacity == 300.0);
    CHECK(inst.cost.transport == 2.25);
    CHECK(inst.transport.depart_hour == 8);
    for (const auto& s : inst.sources) {
      CHECK(s.slot_limit == 4);
      for (double v : s.initial_storages) CHECK(v == 200.0);
    }
    for (const auto& d : inst.destinations) CHECK(d.initial_stock == 200.0);
    CHECK(validate_instance(inst).empty());
  }
}

TEST_CASE("generator is deterministic") {
  GenerationSpec spec;
  spec.n_sources = 3;
  spec.seed = 7;
  CHECK(generate_instance(spec) == generate_instance(spec));
  GenerationSpec other = spec;
  other.seed = 8;
  CHECK_FALSE(generate_instance(spec) == generate_instance(other));
}

TEST_CASE("generator rejects out of range parameters") {
  GenerationSpec spec;
  spec.n_sources = 8;
  CHECK_THROWS_AS(generate_instance(spec), ParameterError);
  spec = {};
  spec.dest_ratio = 9.0;
  CHECK_THROWS_AS(generate_instance(spec), ParameterError);
  spec = {};
  spec.storage_ratio = 1.1;
  CHECK_THROWS_AS(generate_instance(spec), ParameterError);
  spec = {};
  spec.demand_magnitude = 100.0;
  CHECK_THROWS_AS(generate_instance(spec), ParameterError);
  spec = {};
  spec.dissatisfaction = {13.0, 1500.0};
  CHECK_THROWS_AS(generate_instance(spec), ParameterError);
}

TEST_CASE("cumulative demand") {
  GenerationSpec spec;
  spec.demand_magnitude = 85.0;
  const Instance inst = generate_instance(spec);
  const double monday = daily_demand(inst, 0, 1);
  CHECK(monday == doctest::Approx(85.0).epsilon(1e-12));
  CHECK(cumulative_demand(inst, 0, 1, 23) == monday);
  double running = 0.0;
  for (int h = 0; h < 24; ++h) {
    running += inst.destinations[0].hourly_demand[0][h];
    CHECK(cumulative_demand(inst, 0, 1, h) == doctest::Approx(running));
  }
  CHECK(daily_demand(inst, 0, 6) == doctest::Approx(0.5 * monday));
  CHECK(daily_demand(inst, 0, 7) == doctest::Approx(0.25 * monday));
  CHECK_THROWS_AS(cumulative_demand(inst, 0, 0, 5), std::out_of_range);
  CHECK_THROWS_AS(cumulative_demand(inst, 0, 1, 24), std::out_of_range);
  CHECK_THROWS_AS(cumulative_demand(inst, 99, 1, 5), std::out_of_range);

  Instance zero = inst;
  zero.destinations[0].hourly_demand[2].fill(0.0);
  for (int h = 0; h < 24; ++h) CHECK(cumulative_demand(zero, 0, 3, h) == 0.0);
}

TEST_CASE("weekday scaling") {
  CHECK(weekday_scale(1) == 1.0);
  CHECK(weekday_scale(5) == 1.0);
  CHECK(weekday_scale(6) == 0.5);
  CHECK(weekday_scale(7) == 0.25);
  CHECK(weekday_scale(8) == 1.0);
  CHECK(weekday_scale(13) == 0.5);
}

TEST_CASE("json round trip") {
  GenerationSpec spec;
  spec.n_sources = 2;
  spec.seed = 11;
  spec.demand_magnitude = 130.0;
  const Instance inst = generate_instance(spec);
  CHECK(instance_from_json(instance_to_json(inst)) == inst);

  const auto path = std::filesystem::temp_directory_path() / "prpmi_round_trip.json";
  save_instance(inst, path);
  CHECK(load_instance(path) == inst);
  std::filesystem::remove(path);
}

TEST_CASE("schema errors name the field") {
  GenerationSpec spec;
  auto doc = instance_to_json(generate_instance(spec));
  doc.erase("horizon");
  try {
    instance_from_json(doc);
    FAIL("missing horizon accepted");
  } catch (const SchemaError& e) {
    CHECK(e.field() == "horizon");
    CHECK(std::string(e.what()).find("horizon") != std::string::npos);
  }

  auto bad = instance_to_json(generate_instance(spec));
  bad["storage_capacity"] = "lots";
  CHECK_THROWS_AS(instance_from_json(bad), SchemaError);
}

TEST_CASE("file with too little capacity reports A2") {
  GenerationSpec spec;
  spec.demand_magnitude = 130.0;
  auto doc = instance_to_json(generate_instance(spec));
  doc["storage_capacity"] = 100.0;
  for (auto& d : doc["destinations"]) d["initial_stock"] = 50.0;
  for (auto& s : doc["sources"])
    for (auto& v : s["initial_storages"]) v = 50.0;
  try {
    instance_from_json(doc);
    FAIL("undersized storage accepted");
  } catch (const ValidationError& e) {
    const auto& v = e.violations();
    CHECK(std::any_of(v.begin(), v.end(), [](const Violation& x) { return x.assumption == "A2"; }));
  }
  CHECK_NOTHROW(instance_from_json(doc, false));
}

TEST_CASE("validation") {
  GenerationSpec spec;
  Instance inst = generate_instance(spec);
  CHECK(validate_instance(inst).empty());

  Instance heavy = inst;
  heavy.destinations[0].hourly_demand[0].fill(350.0 / 24.0);
  CHECK(has_violation(heavy, "A2"));

  Instance crowded = inst;
  crowded.sources[0].initial_storages.assign(5, 200.0);
  CHECK(has_violation(crowded, "A6"));

  Instance late = inst;
  late.transport.travel_time[0][0] = 20;
  CHECK(has_violation(late, "A5"));
}

TEST_CASE("generator marginals") {
  for (int ns = 1; ns <= 7; ++ns)
    for (int seed = 0; seed < 5; ++seed) {
      GenerationSpec spec;
      spec.n_sources = ns;
      spec.seed = seed;
      spec.dest_ratio = 4.33 + (8.5 - 4.33) * seed / 4.0;
      spec.storage_ratio = 1.26 + 0.24 * seed / 4.0;
      const Instance inst = generate_instance(spec);
      const double dr = static_cast<double>(inst.destination_count()) / inst.source_count();
      const double sr = static_cast<double>(inst.storage_count()) / inst.destination_count();
      CHECK(dr >= 4.33);
      CHECK(dr <= 8.5);
      CHECK(sr >= 1.26);
      CHECK(sr <= 1.5);
      for (const auto& row : inst.transport.distance)
        for (double km : row) {
          CHECK(km >= kMinDistance);
          CHECK(km <= kMaxDistance);
        }
    }
}

TEST_CASE("small instances") {
  const Instance inst = test::tiny_instance(3);
  CHECK(inst.source_count() == 2);
  CHECK(inst.destination_count() == 2);
  CHECK(inst.storage_count() == 4);
  CHECK(validate_instance(inst).empty());
}

}
