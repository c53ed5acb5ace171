#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <vector>

#include "prpmi/milp.hpp"

namespace prpmi {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Column-compressed sparse matrix.
struct CscMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> start;  // size cols + 1
  std::vector<int> index;
  std::vector<double> value;

  int nnz() const { return static_cast<int>(index.size()); }
};

// min c'x + offset  s.t.  row_lower <= A x <= row_upper, col_lower <= x <= col_upper.
struct LpProblem {
  CscMatrix a;
  std::vector<double> cost;
  std::vector<double> col_lower, col_upper;
  std::vector<double> row_lower, row_upper;
  double offset = 0.0;

  int rows() const { return a.rows; }
  int cols() const { return a.cols; }

  static LpProblem from_model(const MilpModel& model);
};

enum class LpStatus : unsigned char { Optimal, Infeasible, Unbounded, Cutoff, Limit, Numerical };

const char* to_string(LpStatus s);

// Deterministic effort accounting shared by the LP engines and the search.
class WorkBudget {
 public:
  WorkBudget() = default;
  WorkBudget(double limit, std::chrono::steady_clock::time_point deadline) : limit_(limit), deadline_(deadline) {}

  void charge(double units) { used_ += units; }
  double used() const { return used_; }
  double limit() const { return limit_; }
  bool work_exhausted() const { return used_ >= limit_; }
  bool time_exhausted() const { return std::chrono::steady_clock::now() >= deadline_; }
  bool exhausted() const { return work_exhausted() || time_exhausted(); }
  bool hit_wall_clock() const { return hit_wall_clock_; }
  void note_wall_clock() { hit_wall_clock_ = true; }

 private:
  double used_ = 0.0;
  double limit_ = kInfinity;
  std::chrono::steady_clock::time_point deadline_ = std::chrono::steady_clock::time_point::max();
  bool hit_wall_clock_ = false;
};

}  // namespace prpmi
