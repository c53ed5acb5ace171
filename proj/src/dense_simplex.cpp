#include "prpmi/dense_simplex.hpp"

#include <cmath>
#include <stdexcept>

namespace prpmi {

int DenseLp::add_variable(double lo, double hi, double c) {
  cost.push_back(c);
  lower.push_back(lo);
  upper.push_back(hi);
  for (auto& r : rows) r.push_back(0.0);
  return n++;
}

void DenseLp::add_row(std::vector<double> coefs, Sense s, double b) {
  if (static_cast<int>(coefs.size()) != n) throw std::invalid_argument("dense row length differs from variable count");
  rows.push_back(std::move(coefs));
  sense.push_back(s);
  rhs.push_back(b);
}

DenseLp DenseLp::from_model(const MilpModel& model) {
  DenseLp lp;
  for (VarId j = 0; j < model.variable_count(); ++j)
    lp.add_variable(model.variable(j).lower, model.variable(j).upper, model.objective()[j]);
  lp.offset = model.objective_offset();
  for (const auto& c : model.constraints()) {
    std::vector<double> row(lp.n, 0.0);
    for (const Term& t : c.terms) row[t.var] = t.coef;
    lp.add_row(std::move(row), c.sense, c.rhs);
  }
  return lp;
}

namespace {

class Tableau {
 public:
  Tableau(int rows, int cols) : m_(rows), n_(cols), t_((rows + 1) * (cols + 1), 0.0), basis_(rows, -1) {}

  double& at(int r, int c) { return t_[r * (n_ + 1) + c]; }
  double at(int r, int c) const { return t_[r * (n_ + 1) + c]; }
  double& rhs(int r) { return at(r, n_); }
  double& obj(int c) { return at(m_, c); }

  void pivot(int r, int c) {
    const double p = at(r, c);
    for (int k = 0; k <= n_; ++k) at(r, k) /= p;
    for (int i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (int k = 0; k <= n_; ++k) at(i, k) -= f * at(r, k);
      at(i, c) = 0.0;
    }
    basis_[r] = c;
  }

  int m_, n_;
  std::vector<double> t_;
  std::vector<int> basis_;
};

// Runs simplex iterations on the objective row; columns with allowed[c] == 0 never enter.
LpStatus iterate(Tableau& tab, const std::vector<char>& allowed, const DenseOptions& opt, DenseResult& res) {
  int degenerate = 0;
  bool bland = false;
  const double eps = opt.tolerance;
  while (true) {
    if (res.pivots >= opt.max_pivots) return LpStatus::Limit;
    int enter = -1;
    double best = -eps;
    for (int c = 0; c < tab.n_; ++c) {
      if (!allowed[c]) continue;
      const double d = tab.obj(c);
      if (bland) {
        if (d < -eps) {
          enter = c;
          break;
        }
      } else if (d < best) {
        best = d;
        enter = c;
      }
    }
    if (enter < 0) return LpStatus::Optimal;
    int leave = -1;
    double ratio = kInfinity;
    for (int r = 0; r < tab.m_; ++r) {
      const double a = tab.at(r, enter);
      if (a <= eps) continue;
      const double q = tab.rhs(r) / a;
      if (q < ratio - eps || (std::abs(q - ratio) <= eps && leave >= 0 && tab.basis_[r] < tab.basis_[leave])) {
        ratio = q;
        leave = r;
      }
    }
    if (leave < 0) return LpStatus::Unbounded;
    if (ratio <= eps) {
      if (++degenerate >= opt.degenerate_limit && !bland) {
        bland = true;
        res.used_bland = true;
      }
    } else {
      degenerate = 0;
    }
    tab.pivot(leave, enter);
    ++res.pivots;
  }
}

}  // namespace

DenseResult solve_dense(const DenseLp& lp, const DenseOptions& opt) {
  DenseResult res;
  const int n = lp.n;
  for (int j = 0; j < n; ++j)
    if (!std::isfinite(lp.lower[j])) throw std::invalid_argument("dense simplex needs finite lower bounds");

  // Rows in shifted variables x' = x - lower, upper bounds as extra rows.
  struct Row {
    std::vector<double> a;
    Sense sense;
    double b;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    double b = lp.rhs[i];
    for (int j = 0; j < n; ++j) b -= lp.rows[i][j] * lp.lower[j];
    rows.push_back({lp.rows[i], lp.sense[i], b});
  }
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(lp.upper[j])) continue;
    std::vector<double> a(n, 0.0);
    a[j] = 1.0;
    rows.push_back({std::move(a), Sense::LessEqual, lp.upper[j] - lp.lower[j]});
  }
  for (auto& r : rows) {
    if (r.b >= 0) continue;
    for (double& v : r.a) v = -v;
    r.b = -r.b;
    if (r.sense == Sense::LessEqual)
      r.sense = Sense::GreaterEqual;
    else if (r.sense == Sense::GreaterEqual)
      r.sense = Sense::LessEqual;
  }

  const int m = static_cast<int>(rows.size());
  int slacks = 0, artificials = 0;
  for (const auto& r : rows) {
    slacks += r.sense != Sense::Equal;
    artificials += r.sense != Sense::LessEqual;
  }
  const int cols = n + slacks + artificials;
  Tableau tab(m, cols);
  std::vector<char> is_artificial(cols, 0);
  int next_slack = n, next_art = n + slacks;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) tab.at(i, j) = rows[i].a[j];
    tab.rhs(i) = rows[i].b;
    if (rows[i].sense == Sense::LessEqual) {
      tab.at(i, next_slack) = 1.0;
      tab.basis_[i] = next_slack++;
    } else {
      if (rows[i].sense == Sense::GreaterEqual) tab.at(i, next_slack++) = -1.0;
      tab.at(i, next_art) = 1.0;
      is_artificial[next_art] = 1;
      tab.basis_[i] = next_art++;
    }
  }

  std::vector<char> allowed(cols, 1);
  if (artificials > 0) {
    for (int c = 0; c <= cols; ++c) tab.obj(c) = 0.0;
    for (int i = 0; i < m; ++i) {
      if (!is_artificial[tab.basis_[i]]) continue;
      for (int c = 0; c <= cols; ++c)
        if (!is_artificial[c] || c == cols) tab.obj(c) -= tab.at(i, c);
    }
    const LpStatus s = iterate(tab, allowed, opt, res);
    if (s == LpStatus::Limit) {
      res.status = s;
      return res;
    }
    if (-tab.obj(cols) > 1e-7 * (1.0 + m)) {
      res.status = LpStatus::Infeasible;
      return res;
    }
    for (int i = 0; i < m; ++i) {
      if (!is_artificial[tab.basis_[i]]) continue;
      for (int c = 0; c < cols; ++c)
        if (!is_artificial[c] && std::abs(tab.at(i, c)) > 1e-9) {
          tab.pivot(i, c);
          ++res.pivots;
          break;
        }
    }
    for (int c = 0; c < cols; ++c)
      if (is_artificial[c]) allowed[c] = 0;
  }

  for (int c = 0; c <= cols; ++c) tab.obj(c) = 0.0;
  for (int j = 0; j < n; ++j) tab.obj(j) = lp.cost[j];
  for (int i = 0; i < m; ++i) {
    const int b = tab.basis_[i];
    const double cb = b < n ? lp.cost[b] : 0.0;
    if (cb == 0.0) continue;
    for (int c = 0; c <= cols; ++c) tab.obj(c) -= cb * tab.at(i, c);
  }
  const LpStatus s = iterate(tab, allowed, opt, res);
  res.status = s;
  if (s != LpStatus::Optimal) return res;

  res.x = lp.lower;
  for (int i = 0; i < m; ++i)
    if (tab.basis_[i] < n) res.x[tab.basis_[i]] += tab.rhs(i);
  res.objective = lp.offset;
  for (int j = 0; j < n; ++j) res.objective += lp.cost[j] * res.x[j];
  return res;
}

}  // namespace prpmi
