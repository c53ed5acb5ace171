#pragma once

#include <cstdint>
#include <span>

#include "prpmi/lp.hpp"
#include "prpmi/milp.hpp"

// Hot loops of the LP engine and the feasibility checks. Every kernel has an
// OpenMP version and a serial reference; both return identical results.
namespace prpmi::kernels {

// alpha[j] = rho . A[:, j] for columns with mask[j] != 0, zero elsewhere.
void pivot_row_serial(const CscMatrix& a, std::span<const double> rho, std::span<const std::uint8_t> mask,
                      std::span<double> alpha);
void pivot_row_parallel(const CscMatrix& a, std::span<const double> rho, std::span<const std::uint8_t> mask,
                        std::span<double> alpha);

struct Pick {
  int index = -1;
  double value = 0.0;
};

// Entry with the largest bound violation above tol, scaled by 1/weight when
// weights are given. Ties go to the lowest index.
Pick max_infeasibility_serial(std::span<const double> x, std::span<const double> lower,
                              std::span<const double> upper, double tol, std::span<const double> weights = {});
Pick max_infeasibility_parallel(std::span<const double> x, std::span<const double> lower,
                                std::span<const double> upper, double tol, std::span<const double> weights = {});

// Largest row violation of a point; ties go to the lowest row.
Pick max_row_violation_serial(const MilpModel& model, std::span<const double> x);
Pick max_row_violation_parallel(const MilpModel& model, std::span<const double> x);

}  // namespace prpmi::kernels
