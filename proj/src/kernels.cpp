#include "prpmi/kernels.hpp"

#include <cmath>

#include <omp.h>

namespace prpmi::kernels {

namespace {

constexpr int kParallelThreshold = 4096;

bool better(const Pick& a, const Pick& b) {
  if (a.index < 0) return false;
  if (b.index < 0) return true;
  return a.value > b.value || (a.value == b.value && a.index < b.index);
}

double violation(double x, double lo, double hi) {
  if (x < lo) return lo - x;
  if (x > hi) return x - hi;
  return 0.0;
}

}  // namespace

void pivot_row_serial(const CscMatrix& a, std::span<const double> rho, std::span<const std::uint8_t> mask,
                      std::span<double> alpha) {
  for (int j = 0; j < a.cols; ++j) {
    double v = 0.0;
    if (mask[j])
      for (int p = a.start[j]; p < a.start[j + 1]; ++p) v += rho[a.index[p]] * a.value[p];
    alpha[j] = v;
  }
}

void pivot_row_parallel(const CscMatrix& a, std::span<const double> rho, std::span<const std::uint8_t> mask,
                        std::span<double> alpha) {
#pragma omp parallel for schedule(static) if (a.cols > kParallelThreshold)
  for (int j = 0; j < a.cols; ++j) {
    double v = 0.0;
    if (mask[j])
      for (int p = a.start[j]; p < a.start[j + 1]; ++p) v += rho[a.index[p]] * a.value[p];
    alpha[j] = v;
  }
}

Pick max_infeasibility_serial(std::span<const double> x, std::span<const double> lower,
                              std::span<const double> upper, double tol, std::span<const double> weights) {
  Pick best;
  const int n = static_cast<int>(x.size());
  for (int i = 0; i < n; ++i) {
    const double v = violation(x[i], lower[i], upper[i]);
    if (v <= tol) continue;
    const Pick cand{i, weights.empty() ? v : v * v / weights[i]};
    if (better(cand, best)) best = cand;
  }
  return best;
}

Pick max_infeasibility_parallel(std::span<const double> x, std::span<const double> lower,
                                std::span<const double> upper, double tol, std::span<const double> weights) {
  const int n = static_cast<int>(x.size());
  if (n <= kParallelThreshold) return max_infeasibility_serial(x, lower, upper, tol, weights);
  Pick best;
#pragma omp parallel
  {
    Pick local;
#pragma omp for schedule(static) nowait
    for (int i = 0; i < n; ++i) {
      const double v = violation(x[i], lower[i], upper[i]);
      if (v <= tol) continue;
      const Pick cand{i, weights.empty() ? v : v * v / weights[i]};
      if (better(cand, local)) local = cand;
    }
#pragma omp critical(prpmi_max_infeasibility)
    if (better(local, best)) best = local;
  }
  return best;
}

Pick max_row_violation_serial(const MilpModel& model, std::span<const double> x) {
  Pick best;
  for (RowId r = 0; r < model.constraint_count(); ++r) {
    const auto& row = model.constraint(r);
    const Pick cand{r, row_violation(row.sense, model.row_activity(r, x), row.rhs)};
    if (better(cand, best)) best = cand;
  }
  return best;
}

Pick max_row_violation_parallel(const MilpModel& model, std::span<const double> x) {
  const int n = model.constraint_count();
  if (n <= kParallelThreshold) return max_row_violation_serial(model, x);
  Pick best;
#pragma omp parallel
  {
    Pick local;
#pragma omp for schedule(static) nowait
    for (int r = 0; r < n; ++r) {
      const auto& row = model.constraint(r);
      const Pick cand{r, row_violation(row.sense, model.row_activity(r, x), row.rhs)};
      if (better(cand, local)) local = cand;
    }
#pragma omp critical(prpmi_max_row_violation)
    if (better(local, best)) best = local;
  }
  return best;
}

}  // namespace prpmi::kernels
