#pragma once

#include <span>
#include <string>
#include <vector>

#include "prpmi/milp.hpp"

namespace prpmi {

// Each kernel accepts affine expressions so that fixed quantities may be passed
// as constants. big_m must bound every continuous argument from above.

// x <= M b, i.e. x > 0 forces b = 1.
void linearize_implication(MilpModel& m, const std::string& name, const LinExpr& x, const LinExpr& b, double big_m);

// Returns a new variable p with p = b * x for binary b and x in [0, M].
VarId linearize_product(MilpModel& m, const std::string& name, const LinExpr& b, const LinExpr& x, double big_m);

// Adds z = min(x1, x2) for x1, x2 in [0, M]; returns the new selector binary
// (b = 1 lets z follow x2, b = 0 lets it follow x1).
VarId linearize_min(MilpModel& m, const std::string& name, const LinExpr& z, const LinExpr& x1, const LinExpr& x2,
                    double big_m);

// Square matrix of assignment binaries; -1 marks pairs that were not created.
struct AssignmentVars {
  int size = 0;
  std::vector<VarId> beta;  // row-major size x size
  VarId at(int n, int m) const { return beta[n * size + m]; }
};

// Pairs every active inflow n with an active outflow m such that
// f_in[n] <= f_out[m]. When `active_in`/`active_out` are given only the marked
// indices receive variables (all pairs are created otherwise).
AssignmentVars linearize_assignment(MilpModel& m, const std::string& name, std::span<const LinExpr> f_in,
                                    std::span<const LinExpr> f_out, std::span<const LinExpr> y_in,
                                    std::span<const LinExpr> y_out, double capacity,
                                    std::span<const char> active_in = {}, std::span<const char> active_out = {});

}  // namespace prpmi
