#pragma once

#include <stdexcept>

#include "prpmi/instance.hpp"
#include "prpmi/model.hpp"
#include "prpmi/teg.hpp"

namespace prpmi {

struct OracleLimits {
  int max_sources = 2;
  int max_destinations = 2;
  int max_horizon = 3;
  int max_storages = 4;
};

struct OracleResult {
  bool feasible = false;
  double value = 0.0;
  FlowSolution solution;
  long routings = 0;      // storage flows enumerated
  long pairings = 0;      // (routing, pairing) combinations evaluated
  long lp_solves = 0;
};

class OracleSizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Exhaustive optimum by enumeration: every storage flow that satisfies the
// routing rules, every pairing of arriving and departing storages at the
// sources, and a branch over the min and unmet regimes of the remaining
// continuous program. With pair_storages = false, refills are pooled per
// source, which gives the relaxed optimum.
OracleResult brute_force_oracle(const Instance& inst, const TimeExpandedGraph& teg, bool pair_storages = true,
                                const OracleLimits& limits = {});

}  // namespace prpmi
