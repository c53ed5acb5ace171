#pragma once

#include <memory>
#include <vector>

#include "prpmi/lp.hpp"

namespace prpmi {

struct DualSimplexOptions {
  double primal_tol = 1e-7;
  double dual_tol = 1e-7;
  double pivot_tol = 1e-7;
  int refactor_interval = 80;
  // Relative size of the cost shifts used against dual degeneracy; 0 disables.
  double perturbation = 1e-6;
  bool parallel = true;  // use the OpenMP kernels
};

struct LpRunLimits {
  WorkBudget* budget = nullptr;
  double cutoff = kInfinity;  // stop once the dual bound reaches this value
  long max_iterations = -1;
};

// Bounded dual simplex on a sparse matrix. Every structural and logical
// variable is kept boxed, so any basis can be made dual feasible by moving
// nonbasic variables to the bound matching the sign of their reduced cost and
// no phase one is needed. Bounds may be changed between solves; the last basis
// is reused.
class DualSimplex {
 public:
  explicit DualSimplex(const LpProblem& lp, DualSimplexOptions options = {});
  ~DualSimplex();
  DualSimplex(DualSimplex&&) noexcept;
  DualSimplex& operator=(DualSimplex&&) noexcept;

  int rows() const;
  int cols() const;

  void set_col_bounds(int j, double lower, double upper);
  double col_lower(int j) const;
  double col_upper(int j) const;

  LpStatus solve(const LpRunLimits& limits = {});

  // Primal objective c'x + offset at the current basis.
  double objective() const;
  // Lagrangian bound from the current duals; valid whatever the basis.
  double dual_bound() const;
  std::vector<double> primal() const;
  long iterations() const;
  long refactorizations() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace prpmi
