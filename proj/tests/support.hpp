#pragma once

#include <string>
#include <vector>

#include "prpmi/instance.hpp"
#include "prpmi/model.hpp"
#include "prpmi/teg.hpp"

namespace prpmi::test {

// Tiny instances within the oracle size guard. Odd seeds use two sources with
// one spare storage each, even seeds one source with two spares.
inline Instance tiny_instance(int seed) {
  SmallInstanceSpec sp;
  sp.sources = 1 + seed % 2;
  sp.destinations = 2;
  sp.horizon = 2 + (seed / 2) % 2;
  sp.seed = static_cast<std::uint64_t>(seed);
  sp.storages_at_source.assign(sp.sources, sp.sources == 1 ? 2 : 1);
  return make_small_instance(sp);
}

// One storage per source: the pairing rows are vacuous.
inline Instance single_storage_instance(int seed) {
  SmallInstanceSpec sp;
  sp.sources = 1;
  sp.destinations = 1;
  sp.slot_limit = 1;
  sp.horizon = 2 + seed % 2;
  sp.seed = static_cast<std::uint64_t>(seed);
  sp.storages_at_source = {0};
  return make_small_instance(sp);
}

// Routing that never moves a storage.
inline StorageFlow park_flow(const Instance& inst, const TimeExpandedGraph& teg) {
  StorageFlow y = initial_flow(inst, teg).y;
  for (int t = 1; t < teg.layer_count(); ++t) {
    for (int d = 0; d < teg.destination_count(); ++d) y[teg.dest_self(d, TimeIndex(t))] = 1;
    for (int s = 0; s < teg.source_count(); ++s) {
      const int n = static_cast<int>(inst.sources[s].initial_storages.size());
      for (int k = 0; k < n; ++k) y[teg.source_self(s, k, TimeIndex(t))] = 1;
    }
  }
  return y;
}

inline std::string fixture_path(const std::string& name) { return std::string(PRPMI_FIXTURE_DIR) + "/" + name; }

}  // namespace prpmi::test
