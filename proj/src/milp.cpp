#include "prpmi/milp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace prpmi {

LinExpr& LinExpr::operator+=(const LinExpr& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  constant_ += other.constant_;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other) {
  for (const Term& t : other.terms_) terms_.push_back({t.var, -t.coef});
  constant_ -= other.constant_;
  return *this;
}

LinExpr& LinExpr::operator*=(double k) {
  for (Term& t : terms_) t.coef *= k;
  constant_ *= k;
  return *this;
}

double LinExpr::evaluate(std::span<const double> x) const {
  double v = constant_;
  for (const Term& t : terms_) v += t.coef * x[t.var];
  return v;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(double k, LinExpr a) { return a *= k; }

double row_violation(Sense sense, double activity, double rhs) {
  switch (sense) {
    case Sense::LessEqual:
      return std::max(0.0, activity - rhs);
    case Sense::GreaterEqual:
      return std::max(0.0, rhs - activity);
    case Sense::Equal:
      return std::abs(activity - rhs);
  }
  return 0.0;
}

VarId MilpModel::add_variable(std::string name, VarType type, double lower, double upper) {
  if (lower > upper) throw std::invalid_argument("variable '" + name + "' has lower bound above upper bound");
  if (type == VarType::Binary && (lower < 0.0 || upper > 1.0))
    throw std::invalid_argument("binary variable '" + name + "' must stay within [0, 1]");
  const VarId id = variable_count();
  if (!var_index_.emplace(name, id).second) throw std::invalid_argument("duplicate variable name '" + name + "'");
  vars_.push_back({std::move(name), type, lower, upper});
  objective_.push_back(0.0);
  return id;
}

int MilpModel::binary_count() const {
  return static_cast<int>(std::count_if(vars_.begin(), vars_.end(),
                                        [](const Variable& v) { return v.type == VarType::Binary; }));
}

std::optional<RowId> MilpModel::add_constraint(std::string name, const LinExpr& lhs, Sense sense,
                                               const LinExpr& rhs) {
  std::vector<Term> terms = lhs.terms();
  for (const Term& t : rhs.terms()) terms.push_back({t.var, -t.coef});
  for (const Term& t : terms)
    if (t.var < 0 || t.var >= variable_count())
      throw std::out_of_range("constraint '" + name + "' references an unknown variable");
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  for (const Term& t : terms) {
    if (!merged.empty() && merged.back().var == t.var)
      merged.back().coef += t.coef;
    else
      merged.push_back(t);
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  const double bound = rhs.constant() - lhs.constant();

  if (merged.empty()) {
    if (row_violation(sense, 0.0, bound) > 1e-9) constant_conflicts_.push_back(name);
    return std::nullopt;
  }
  const RowId id = constraint_count();
  if (!row_index_.emplace(name, id).second) throw std::invalid_argument("duplicate constraint name '" + name + "'");
  rows_.push_back({std::move(name), std::move(merged), sense, bound});
  return id;
}

void MilpModel::add_objective(const LinExpr& expr) {
  for (const Term& t : expr.terms()) {
    if (t.var < 0 || t.var >= variable_count()) throw std::out_of_range("objective references an unknown variable");
    objective_[t.var] += t.coef;
  }
  offset_ += expr.constant();
}

std::optional<VarId> MilpModel::find_variable(std::string_view name) const {
  auto it = var_index_.find(std::string(name));
  if (it == var_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<RowId> MilpModel::find_constraint(std::string_view name) const {
  auto it = row_index_.find(std::string(name));
  if (it == row_index_.end()) return std::nullopt;
  return it->second;
}

void MilpModel::set_bounds(VarId v, double lower, double upper) {
  if (lower > upper) throw std::invalid_argument("lower bound above upper bound");
  vars_.at(v).lower = lower;
  vars_.at(v).upper = upper;
}

double MilpModel::evaluate_objective(std::span<const double> x) const {
  double v = offset_;
  for (VarId j = 0; j < variable_count(); ++j) v += objective_[j] * x[j];
  return v;
}

double MilpModel::row_activity(RowId r, std::span<const double> x) const {
  double a = 0.0;
  for (const Term& t : rows_[r].terms) a += t.coef * x[t.var];
  return a;
}

RowReport MilpModel::worst_violation(std::span<const double> x) const {
  if (x.size() != vars_.size()) throw std::invalid_argument("assignment size does not match the model");
  RowReport worst;
  if (trivially_infeasible()) worst.amount = 1.0;
  for (VarId j = 0; j < variable_count(); ++j) {
    const Variable& v = vars_[j];
    double amount = std::max({0.0, v.lower - x[j], x[j] - v.upper});
    if (v.type == VarType::Binary) amount = std::max(amount, std::abs(x[j] - std::round(x[j])));
    if (amount > worst.amount) worst = {-1, j, amount};
  }
  for (RowId r = 0; r < constraint_count(); ++r) {
    const double amount = row_violation(rows_[r].sense, row_activity(r, x), rows_[r].rhs);
    if (amount > worst.amount) worst = {r, -1, amount};
  }
  return worst;
}

}  // namespace prpmi
