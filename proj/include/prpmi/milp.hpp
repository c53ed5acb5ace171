#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace prpmi {

using VarId = int;
using RowId = int;

struct Term {
  VarId var;
  double coef;
};

// Affine expression: sum of coef * var plus a constant.
class LinExpr {
 public:
  LinExpr() = default;
  LinExpr(double constant) : constant_(constant) {}  // NOLINT(google-explicit-constructor)
  static LinExpr var(VarId v, double coef = 1.0) {
    LinExpr e;
    e.terms_.push_back({v, coef});
    return e;
  }

  LinExpr& add(VarId v, double coef) {
    if (coef != 0.0) terms_.push_back({v, coef});
    return *this;
  }
  LinExpr& operator+=(const LinExpr& other);
  LinExpr& operator-=(const LinExpr& other);
  LinExpr& operator*=(double k);

  const std::vector<Term>& terms() const { return terms_; }
  double constant() const { return constant_; }
  bool is_constant() const { return terms_.empty(); }
  double evaluate(std::span<const double> x) const;

 private:
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double k, LinExpr a);

enum class VarType : unsigned char { Continuous, Binary };
enum class Sense : unsigned char { LessEqual, Equal, GreaterEqual };

struct Variable {
  std::string name;
  VarType type = VarType::Continuous;
  double lower = 0.0;
  double upper = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;  // sorted by variable, no duplicates, no zeros
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

struct RowReport {
  RowId row = -1;  // -1 when the worst violation is a bound or integrality
  VarId var = -1;
  double amount = 0.0;
};

class MilpModel {
 public:
  VarId add_variable(std::string name, VarType type, double lower, double upper);
  VarId add_binary(std::string name) { return add_variable(std::move(name), VarType::Binary, 0.0, 1.0); }
  VarId add_continuous(std::string name, double lower, double upper) {
    return add_variable(std::move(name), VarType::Continuous, lower, upper);
  }

  // Adds lhs (sense) rhs. Constants move to the right-hand side and repeated
  // variables are merged. A row without variables is checked instead of
  // stored; an unsatisfiable one marks the model infeasible.
  std::optional<RowId> add_constraint(std::string name, const LinExpr& lhs, Sense sense, const LinExpr& rhs = {});

  void add_objective(const LinExpr& expr);

  int variable_count() const { return static_cast<int>(vars_.size()); }
  int constraint_count() const { return static_cast<int>(rows_.size()); }
  int binary_count() const;
  const Variable& variable(VarId v) const { return vars_[v]; }
  const std::vector<Variable>& variables() const { return vars_; }
  const Constraint& constraint(RowId r) const { return rows_[r]; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  const std::vector<double>& objective() const { return objective_; }
  double objective_offset() const { return offset_; }
  bool trivially_infeasible() const { return !constant_conflicts_.empty(); }
  const std::vector<std::string>& constant_conflicts() const { return constant_conflicts_; }

  std::optional<VarId> find_variable(std::string_view name) const;
  std::optional<RowId> find_constraint(std::string_view name) const;

  void set_bounds(VarId v, double lower, double upper);

  double evaluate_objective(std::span<const double> x) const;
  double row_activity(RowId r, std::span<const double> x) const;
  // Largest violation over rows, bounds and integrality.
  RowReport worst_violation(std::span<const double> x) const;
  double max_violation(std::span<const double> x) const { return worst_violation(x).amount; }

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  std::vector<double> objective_;
  double offset_ = 0.0;
  std::unordered_map<std::string, VarId> var_index_;
  std::unordered_map<std::string, RowId> row_index_;
  std::vector<std::string> constant_conflicts_;
};

double row_violation(Sense sense, double activity, double rhs);

}  // namespace prpmi
