#pragma once

#include <vector>

#include "prpmi/lp.hpp"
#include "prpmi/milp.hpp"

namespace prpmi {

// Small LP held as dense rows; lower bounds must be finite.
struct DenseLp {
  int n = 0;
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;  // kInfinity when absent
  std::vector<std::vector<double>> rows;
  std::vector<Sense> sense;
  std::vector<double> rhs;
  double offset = 0.0;

  int add_variable(double lo, double hi, double c = 0.0);
  void add_row(std::vector<double> coefs, Sense s, double b);

  // Continuous relaxation of a model.
  static DenseLp from_model(const MilpModel& model);
};

struct DenseOptions {
  double tolerance = 1e-9;
  int degenerate_limit = 1000;  // consecutive degenerate pivots before Bland's rule
  long max_pivots = 1000000;
};

struct DenseResult {
  LpStatus status = LpStatus::Numerical;
  double objective = 0.0;
  std::vector<double> x;
  long pivots = 0;
  bool used_bland = false;
};

// Two-phase primal simplex on a dense tableau.
DenseResult solve_dense(const DenseLp& lp, const DenseOptions& options = {});

}  // namespace prpmi
