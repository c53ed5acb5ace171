#include "prpmi/linearize.hpp"

#include <stdexcept>

namespace prpmi {

namespace {

void check_big_m(double big_m) {
  if (!(big_m > 0.0)) throw std::invalid_argument("big-M must be positive");
}

}  // namespace

void linearize_implication(MilpModel& m, const std::string& name, const LinExpr& x, const LinExpr& b,
                           double big_m) {
  check_big_m(big_m);
  m.add_constraint(name, x, Sense::LessEqual, big_m * b);
}

VarId linearize_product(MilpModel& m, const std::string& name, const LinExpr& b, const LinExpr& x, double big_m) {
  check_big_m(big_m);
  const VarId p = m.add_continuous(name, 0.0, big_m);
  const LinExpr pe = LinExpr::var(p);
  m.add_constraint(name + "_x", pe, Sense::LessEqual, x);
  m.add_constraint(name + "_b", pe, Sense::LessEqual, big_m * b);
  m.add_constraint(name + "_xb", pe, Sense::GreaterEqual, x - big_m * (LinExpr(1.0) - b));
  return p;
}

VarId linearize_min(MilpModel& m, const std::string& name, const LinExpr& z, const LinExpr& x1, const LinExpr& x2,
                    double big_m) {
  check_big_m(big_m);
  const VarId b = m.add_binary(name + "_sel");
  const LinExpr be = LinExpr::var(b);
  m.add_constraint(name + "_le1", z, Sense::LessEqual, x1);
  m.add_constraint(name + "_le2", z, Sense::LessEqual, x2);
  m.add_constraint(name + "_ge1", z, Sense::GreaterEqual, x1 - big_m * be);
  m.add_constraint(name + "_ge2", z, Sense::GreaterEqual, x2 - big_m * (LinExpr(1.0) - be));
  return b;
}

AssignmentVars linearize_assignment(MilpModel& m, const std::string& name, std::span<const LinExpr> f_in,
                                    std::span<const LinExpr> f_out, std::span<const LinExpr> y_in,
                                    std::span<const LinExpr> y_out, double capacity,
                                    std::span<const char> active_in, std::span<const char> active_out) {
  const std::size_t n = f_in.size();
  if (f_out.size() != n || y_in.size() != n || y_out.size() != n)
    throw std::invalid_argument("assignment vectors must share one length");
  if ((!active_in.empty() && active_in.size() != n) || (!active_out.empty() && active_out.size() != n))
    throw std::invalid_argument("assignment activity masks must match the vector length");
  check_big_m(capacity);
  auto in_on = [&](std::size_t i) { return active_in.empty() || active_in[i]; };
  auto out_on = [&](std::size_t i) { return active_out.empty() || active_out[i]; };

  AssignmentVars vars;
  vars.size = static_cast<int>(n);
  vars.beta.assign(n * n, -1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (in_on(i) && out_on(k))
        vars.beta[i * n + k] = m.add_binary(name + "_b_" + std::to_string(i + 1) + "_" + std::to_string(k + 1));

  for (std::size_t i = 0; i < n; ++i) {
    LinExpr row;
    for (std::size_t k = 0; k < n; ++k)
      if (vars.beta[i * n + k] >= 0) row.add(vars.beta[i * n + k], 1.0);
    m.add_constraint(name + "_in_" + std::to_string(i + 1), row, Sense::Equal, y_in[i]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    LinExpr col;
    for (std::size_t i = 0; i < n; ++i)
      if (vars.beta[i * n + k] >= 0) col.add(vars.beta[i * n + k], 1.0);
    m.add_constraint(name + "_out_" + std::to_string(k + 1), col, Sense::Equal, y_out[k]);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const VarId b = vars.beta[i * n + k];
      if (b < 0) continue;
      m.add_constraint(name + "_f_" + std::to_string(i + 1) + "_" + std::to_string(k + 1), f_in[i],
                       Sense::LessEqual, f_out[k] + capacity * (LinExpr(1.0) - LinExpr::var(b)));
    }
  return vars;
}

}  // namespace prpmi
