#include "prpmi/dual_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "prpmi/kernels.hpp"

namespace prpmi {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Infeasible:
      return "infeasible";
    case LpStatus::Unbounded:
      return "unbounded";
    case LpStatus::Cutoff:
      return "cutoff";
    case LpStatus::Limit:
      return "limit";
    case LpStatus::Numerical:
      return "numerical";
  }
  return "?";
}

LpProblem LpProblem::from_model(const MilpModel& model) {
  LpProblem lp;
  const int n = model.variable_count(), m = model.constraint_count();
  lp.a.rows = m;
  lp.a.cols = n;
  lp.cost = model.objective();
  lp.offset = model.objective_offset();
  for (const auto& v : model.variables()) {
    lp.col_lower.push_back(v.lower);
    lp.col_upper.push_back(v.upper);
  }
  std::vector<int> count(n + 1, 0);
  for (const auto& row : model.constraints())
    for (const Term& t : row.terms) ++count[t.var + 1];
  lp.a.start.assign(n + 1, 0);
  for (int j = 0; j < n; ++j) lp.a.start[j + 1] = lp.a.start[j] + count[j + 1];
  lp.a.index.resize(lp.a.start[n]);
  lp.a.value.resize(lp.a.start[n]);
  std::vector<int> fill(lp.a.start.begin(), lp.a.start.end() - 1);
  for (int i = 0; i < m; ++i) {
    const auto& row = model.constraint(i);
    for (const Term& t : row.terms) {
      lp.a.index[fill[t.var]] = i;
      lp.a.value[fill[t.var]++] = t.coef;
    }
    lp.row_lower.push_back(row.sense == Sense::LessEqual ? -kInfinity : row.rhs);
    lp.row_upper.push_back(row.sense == Sense::GreaterEqual ? kInfinity : row.rhs);
  }
  return lp;
}

namespace {

enum : std::uint8_t { kBasic = 0, kAtLower = 1, kAtUpper = 2 };

constexpr double kBoxFallback = 1e9;

struct Eta {
  int pos;
  double pivot;
  std::vector<int> index;
  std::vector<double> value;
};

}  // namespace

struct DualSimplex::Impl {
  using SpMat = Eigen::SparseMatrix<double>;

  DualSimplexOptions opt;
  int n = 0, m = 0;
  CscMatrix a;
  // Row-wise copy for sparse pivot rows.
  std::vector<int> row_start, row_col;
  std::vector<double> row_val;

  std::vector<double> cost, lower, upper, x, d;
  // Cost perturbation active during a solve; d is taken against cost + shift.
  std::vector<double> shift;
  bool perturbed = false;
  std::vector<std::uint8_t> status;
  std::vector<int> basic, pos;
  std::vector<double> weight;
  double offset = 0.0;
  bool bounds_conflict = false;

  // Factorization of the basis at the last refactor: basic structurals occupy
  // positions [0, ns); logicals fill the rest. Only the structural block over
  // rows whose logical is nonbasic goes through LU.
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  int ns = 0;
  std::vector<int> k_row;    // K row k -> matrix row
  std::vector<int> row_k;    // matrix row -> K row or -1
  std::vector<int> logical_pos_row;  // position p >= ns -> matrix row
  std::vector<Eta> etas;
  bool factored = false;
  double factor_cost = 0.0;

  long iters = 0;
  long refactors = 0;

  std::vector<double> work_m, work_m2, alpha_row, alpha_col, rho, tau;
  std::vector<std::uint8_t> mask, seen;
  std::vector<int> touched, rho_nz;
  std::vector<double> xb, lb, ub;

  explicit Impl(const LpProblem& lp, DualSimplexOptions o) : opt(o), n(lp.cols()), m(lp.rows()), a(lp.a) {
    offset = lp.offset;
    cost.assign(n + m, 0.0);
    std::copy(lp.cost.begin(), lp.cost.end(), cost.begin());
    lower.resize(n + m);
    upper.resize(n + m);
    for (int j = 0; j < n; ++j) {
      lower[j] = std::isfinite(lp.col_lower[j]) ? lp.col_lower[j] : -kBoxFallback;
      upper[j] = std::isfinite(lp.col_upper[j]) ? lp.col_upper[j] : kBoxFallback;
    }
    std::vector<double> lo(m, 0.0), hi(m, 0.0);
    for (int j = 0; j < n; ++j)
      for (int p = a.start[j]; p < a.start[j + 1]; ++p) {
        const double v = a.value[p];
        lo[a.index[p]] += std::min(v * lower[j], v * upper[j]);
        hi[a.index[p]] += std::max(v * lower[j], v * upper[j]);
      }
    for (int i = 0; i < m; ++i) {
      lower[n + i] = std::max(lp.row_lower[i], lo[i]);
      upper[n + i] = std::min(lp.row_upper[i], hi[i]);
      if (lower[n + i] > upper[n + i]) {
        if (lower[n + i] - upper[n + i] > 1e-9 * (1.0 + std::abs(upper[n + i])))
          bounds_conflict = true;
        else
          lower[n + i] = upper[n + i];
      }
    }

    std::vector<int> count(m + 1, 0);
    for (int p = 0; p < a.nnz(); ++p) ++count[a.index[p] + 1];
    row_start.assign(m + 1, 0);
    for (int i = 0; i < m; ++i) row_start[i + 1] = row_start[i] + count[i + 1];
    row_col.resize(a.nnz());
    row_val.resize(a.nnz());
    std::vector<int> fill(row_start.begin(), row_start.end() - 1);
    for (int j = 0; j < n; ++j)
      for (int p = a.start[j]; p < a.start[j + 1]; ++p) {
        row_col[fill[a.index[p]]] = j;
        row_val[fill[a.index[p]]++] = a.value[p];
      }

    x.assign(n + m, 0.0);
    d.assign(n + m, 0.0);
    shift.assign(n + m, 0.0);
    status.assign(n + m, kAtLower);
    basic.resize(m);
    pos.assign(n + m, -1);
    for (int i = 0; i < m; ++i) {
      basic[i] = n + i;
      pos[n + i] = i;
      status[n + i] = kBasic;
    }
    weight.assign(m, 1.0);
    work_m.assign(m, 0.0);
    work_m2.assign(m, 0.0);
    alpha_row.assign(n, 0.0);
    alpha_col.assign(m, 0.0);
    rho.assign(m, 0.0);
    tau.assign(m, 0.0);
    mask.assign(n, 0);
    seen.assign(n, 0);
    xb.assign(m, 0.0);
    lb.assign(m, 0.0);
    ub.assign(m, 0.0);
  }

  // ---- factorization -------------------------------------------------------

  void slack_basis() {
    for (int j = 0; j < n + m; ++j)
      if (status[j] == kBasic) status[j] = kAtLower;
    for (int i = 0; i < m; ++i) {
      basic[i] = n + i;
      status[n + i] = kBasic;
    }
    std::fill(pos.begin(), pos.end(), -1);
    for (int i = 0; i < m; ++i) pos[n + i] = i;
    std::fill(weight.begin(), weight.end(), 1.0);
  }

  bool factor_current() {
    std::vector<int> structural, logical_rows;
    std::vector<char> row_covered(m, 0);
    for (int p = 0; p < m; ++p) {
      if (basic[p] < n)
        structural.push_back(basic[p]);
      else
        row_covered[basic[p] - n] = 1;
    }
    std::sort(structural.begin(), structural.end());
    ns = static_cast<int>(structural.size());
    row_k.assign(m, -1);
    k_row.clear();
    logical_pos_row.clear();
    for (int i = 0; i < m; ++i) {
      if (row_covered[i]) {
        logical_pos_row.push_back(i);
      } else {
        row_k[i] = static_cast<int>(k_row.size());
        k_row.push_back(i);
      }
    }
    if (static_cast<int>(k_row.size()) != ns) return false;
    std::vector<double> old_weight(weight);
    std::vector<int> old_basic(basic);
    for (int k = 0; k < ns; ++k) basic[k] = structural[k];
    for (int t = 0; t < static_cast<int>(logical_pos_row.size()); ++t) basic[ns + t] = n + logical_pos_row[t];
    for (int p = 0; p < m; ++p) pos[basic[p]] = p;
    for (int p = 0; p < m; ++p) weight[pos[old_basic[p]]] = old_weight[p];
    factor_basic.assign(basic.begin(), basic.begin() + ns);

    etas.clear();
    factor_cost = 0.0;
    if (ns > 0) {
      std::vector<Eigen::Triplet<double>> trip;
      for (int k = 0; k < ns; ++k) {
        const int j = basic[k];
        for (int p = a.start[j]; p < a.start[j + 1]; ++p)
          if (row_k[a.index[p]] >= 0) trip.emplace_back(row_k[a.index[p]], k, a.value[p]);
      }
      SpMat kmat(ns, ns);
      kmat.setFromTriplets(trip.begin(), trip.end());
      kmat.makeCompressed();
      lu.analyzePattern(kmat);
      lu.factorize(kmat);
      if (lu.info() != Eigen::Success) return false;
      factor_cost = 4.0 * static_cast<double>(trip.size()) + ns;
    }
    ++refactors;
    factored = true;
    return true;
  }

  void refactor() {
    if (!factor_current() || !residual_ok()) {
      slack_basis();
      const bool ok = factor_current();
      if (!ok) throw std::logic_error("slack basis failed to factor");
    }
  }

  // Checks the fresh factorization on a random-looking right-hand side.
  bool residual_ok() {
    if (ns == 0) return true;
    std::vector<double> b(m), v(m);
    for (int i = 0; i < m; ++i) b[i] = 1.0 + (i % 7) * 0.25;
    v = b;
    ftran(v);
    std::vector<double> r(b);
    for (int p = 0; p < m; ++p) {
      const int j = basic[p];
      if (j < n) {
        for (int q = a.start[j]; q < a.start[j + 1]; ++q) r[a.index[q]] -= a.value[q] * v[p];
      } else {
        r[j - n] += v[p];
      }
    }
    double worst = 0.0, scale = 1.0;
    for (int i = 0; i < m; ++i) {
      worst = std::max(worst, std::abs(r[i]));
      scale = std::max(scale, std::abs(v[i]));
    }
    return std::isfinite(worst) && worst <= 1e-6 * scale;
  }

  // v: right-hand side in row space on entry, solution in position space on exit.
  void ftran(std::vector<double>& v) {
    std::vector<double>& out = work_m2;
    if (ns > 0) {
      Eigen::VectorXd rhs(ns);
      for (int k = 0; k < ns; ++k) rhs[k] = v[k_row[k]];
      Eigen::VectorXd u = lu.solve(rhs);
      for (int k = 0; k < ns; ++k) out[k] = u[k];
      std::fill(work_m.begin(), work_m.end(), 0.0);
      for (int k = 0; k < ns; ++k) {
        const int j = basic_at_factor(k);
        if (u[k] == 0.0) continue;
        for (int p = a.start[j]; p < a.start[j + 1]; ++p)
          if (row_k[a.index[p]] < 0) work_m[a.index[p]] += a.value[p] * u[k];
      }
      for (int t = 0; t < m - ns; ++t) {
        const int i = logical_pos_row[t];
        out[ns + t] = work_m[i] - v[i];
      }
    } else {
      for (int t = 0; t < m; ++t) out[t] = -v[logical_pos_row[t]];
    }
    for (const Eta& e : etas) {
      const double vp = out[e.pos] / e.pivot;
      if (vp != 0.0)
        for (std::size_t q = 0; q < e.index.size(); ++q) out[e.index[q]] -= e.value[q] * vp;
      out[e.pos] = vp;
    }
    v.swap(out);
    out.assign(m, 0.0);
  }

  // v: vector in position space on entry, row-space solution y of y'B = v' on exit.
  void btran(std::vector<double>& v) {
    for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
      double s = v[it->pos];
      for (std::size_t q = 0; q < it->index.size(); ++q) s -= it->value[q] * v[it->index[q]];
      v[it->pos] = s / it->pivot;
    }
    std::vector<double>& y = work_m2;
    std::fill(y.begin(), y.end(), 0.0);
    for (int t = 0; t < m - ns; ++t) y[logical_pos_row[t]] = -v[ns + t];
    if (ns > 0) {
      Eigen::VectorXd g(ns);
      for (int k = 0; k < ns; ++k) {
        const int j = basic_at_factor(k);
        double s = v[k];
        for (int p = a.start[j]; p < a.start[j + 1]; ++p)
          if (row_k[a.index[p]] < 0) s -= a.value[p] * y[a.index[p]];
        g[k] = s;
      }
      Eigen::VectorXd u = lu.transpose().solve(g);
      for (int k = 0; k < ns; ++k) y[k_row[k]] = u[k];
    }
    v.swap(y);
  }

  // Structural column that sat at position k when the factorization was built.
  std::vector<int> factor_basic;
  int basic_at_factor(int k) const { return factor_basic[k]; }

  void do_refactor() { refactor(); }

  double solve_cost() const {
    double eta_nnz = 0.0;
    for (const Eta& e : etas) eta_nnz += static_cast<double>(e.index.size());
    return factor_cost + eta_nnz + m;
  }

  // ---- primal and dual values ---------------------------------------------

  void place_nonbasic(int j) {
    x[j] = status[j] == kAtUpper ? upper[j] : lower[j];
  }

  void compute_primal() {
    std::vector<double> rhs(m, 0.0);
    for (int j = 0; j < n; ++j) {
      if (status[j] == kBasic) continue;
      place_nonbasic(j);
      if (x[j] == 0.0) continue;
      for (int p = a.start[j]; p < a.start[j + 1]; ++p) rhs[a.index[p]] -= a.value[p] * x[j];
    }
    for (int i = 0; i < m; ++i) {
      const int j = n + i;
      if (status[j] == kBasic) continue;
      place_nonbasic(j);
      rhs[i] += x[j];
    }
    ftran(rhs);
    for (int p = 0; p < m; ++p) x[basic[p]] = rhs[p];
  }

  void compute_duals() {
    std::vector<double> cb(m);
    for (int p = 0; p < m; ++p) cb[p] = cost[basic[p]] + shift[basic[p]];
    btran(cb);
    const std::vector<double>& pi = cb;
    for (int j = 0; j < n; ++j) {
      if (status[j] == kBasic) {
        d[j] = 0.0;
        continue;
      }
      double s = cost[j] + shift[j];
      for (int p = a.start[j]; p < a.start[j + 1]; ++p) s -= pi[a.index[p]] * a.value[p];
      d[j] = s;
    }
    for (int i = 0; i < m; ++i) d[n + i] = status[n + i] == kBasic ? 0.0 : pi[i] + shift[n + i];
  }

  // Small deterministic cost shifts pointing away from the current bounds,
  // against dual degeneracy. Columns with fallback boxes are left alone so the
  // Lagrangian bound of the true costs stays tight.
  void perturb() {
    double scale = 0.0;
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(cost[j]));
    if (scale == 0.0) return;
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (int j = 0; j < n + m; ++j) {
      h ^= h >> 12;
      h ^= h << 25;
      h ^= h >> 27;
      const double u = static_cast<double>((h * 0x2545f4914f6cdd1dull) >> 11) * 0x1.0p-53;
      const double range = upper[j] - lower[j];
      if (!(range > 0.0) || range >= 1e7) continue;
      const double mag = opt.perturbation * (1.0 + std::abs(cost[j])) * (1.0 + u);
      shift[j] = status[j] == kAtUpper ? -mag : mag;
    }
    perturbed = true;
  }

  void unperturb() {
    std::fill(shift.begin(), shift.end(), 0.0);
    perturbed = false;
  }

  // Moves nonbasic variables to the bound their reduced cost asks for.
  bool restore_dual_feasibility() {
    bool moved = false;
    for (int j = 0; j < n + m; ++j) {
      if (status[j] == kBasic) continue;
      if (lower[j] == upper[j]) {
        status[j] = kAtLower;
        continue;
      }
      if (d[j] < -opt.dual_tol && status[j] != kAtUpper) {
        status[j] = kAtUpper;
        moved = true;
      } else if (d[j] > opt.dual_tol && status[j] != kAtLower) {
        status[j] = kAtLower;
        moved = true;
      }
    }
    return moved;
  }

  void fresh_start() {
    do_refactor();
    compute_duals();
    restore_dual_feasibility();
    compute_primal();
  }

  double objective() const {
    double v = offset;
    for (int j = 0; j < n; ++j) v += cost[j] * x[j];
    return v;
  }

  // min over the boxes of the Lagrangian at the current duals, with true costs.
  double lagrangian() const {
    double v = offset;
    for (int j = 0; j < n + m; ++j) {
      const double dj = (status[j] == kBasic ? 0.0 : d[j]) - shift[j];
      if (dj == 0.0) continue;
      v += dj > 0 ? dj * lower[j] : dj * upper[j];
    }
    return v;
  }

  // ---- iterations ------------------------------------------------------------

  struct Candidate {
    int j;
    double ratio;
    double abs_alpha;
  };

  // Fills alpha_row on the nonbasic structurals, listing the entries that may
  // be nonzero in touched and the rows with nonzero rho in rho_nz.
  void compute_pivot_row() {
    for (int j : touched) alpha_row[j] = 0.0;
    touched.clear();
    rho_nz.clear();
    for (int i = 0; i < m; ++i)
      if (rho[i] != 0.0) rho_nz.push_back(i);
    const int nz = static_cast<int>(rho_nz.size());
    if (nz * 10 < m) {
      for (int i : rho_nz) {
        const double r = rho[i];
        for (int p = row_start[i]; p < row_start[i + 1]; ++p) {
          const int j = row_col[p];
          if (status[j] == kBasic) continue;
          if (!seen[j]) {
            seen[j] = 1;
            touched.push_back(j);
          }
          alpha_row[j] += r * row_val[p];
        }
      }
      for (int j : touched) seen[j] = 0;
      last_row_cost = 2.0 * row_start[m] * (static_cast<double>(nz) / std::max(1, m)) + touched.size();
      return;
    }
    for (int j = 0; j < n; ++j) mask[j] = status[j] != kBasic;
    if (opt.parallel)
      kernels::pivot_row_parallel(a, rho, mask, alpha_row);
    else
      kernels::pivot_row_serial(a, rho, mask, alpha_row);
    for (int j = 0; j < n; ++j)
      if (alpha_row[j] != 0.0) touched.push_back(j);
    last_row_cost = a.nnz() + 2.0 * n;
  }
  double last_row_cost = 0.0;

  double alpha_of(int j) const { return j < n ? alpha_row[j] : -rho[j - n]; }

  LpStatus iterate(const LpRunLimits& limits) {
    long since_refactor = 0;
    bool verified = false;
    std::vector<Candidate> cands;
    std::vector<double> flip_rhs(m);
    while (true) {
      if (limits.budget && limits.budget->exhausted()) {
        if (limits.budget->time_exhausted()) limits.budget->note_wall_clock();
        return LpStatus::Limit;
      }
      if (limits.max_iterations >= 0 && iters >= limits.max_iterations) return LpStatus::Limit;
      if (since_refactor >= opt.refactor_interval) {
        fresh_start();
        since_refactor = 0;
      }
      if (std::isfinite(limits.cutoff) && lagrangian() >= limits.cutoff) return LpStatus::Cutoff;

      for (int p = 0; p < m; ++p) {
        xb[p] = x[basic[p]];
        lb[p] = lower[basic[p]];
        ub[p] = upper[basic[p]];
      }
      const kernels::Pick pick = opt.parallel ? kernels::max_infeasibility_parallel(xb, lb, ub, opt.primal_tol, weight)
                                              : kernels::max_infeasibility_serial(xb, lb, ub, opt.primal_tol, weight);
      if (limits.budget) limits.budget->charge(3.0 * m);
      if (pick.index < 0) {
        if (!verified && (since_refactor > 0 || !etas.empty())) {
          fresh_start();
          since_refactor = 0;
          verified = true;
          continue;
        }
        return LpStatus::Optimal;
      }
      verified = false;
      const int p = pick.index;
      const int leaving = basic[p];
      const bool to_upper = x[leaving] > upper[leaving];
      const double target = to_upper ? upper[leaving] : lower[leaving];
      const double sgn = to_upper ? 1.0 : -1.0;

      std::fill(rho.begin(), rho.end(), 0.0);
      rho[p] = 1.0;
      btran(rho);
      compute_pivot_row();
      if (limits.budget) limits.budget->charge(2.0 * solve_cost() + last_row_cost);

      cands.clear();
      auto consider = [&](int j) {
        if (status[j] == kBasic || lower[j] == upper[j]) return;
        const double al = alpha_of(j);
        if (std::abs(al) < opt.pivot_tol) return;
        const double sa = sgn * al;
        if ((status[j] == kAtLower && sa > 0) || (status[j] == kAtUpper && sa < 0))
          cands.push_back({j, std::max(0.0, std::abs(d[j])) / std::abs(al), std::abs(al)});
      };
      for (int j : touched) consider(j);
      for (int i : rho_nz) consider(n + i);
      if (cands.empty()) {
        if (!etas.empty() || since_refactor > 0) {
          fresh_start();
          since_refactor = 0;
          continue;
        }
        return LpStatus::Infeasible;
      }
      std::sort(cands.begin(), cands.end(), [](const Candidate& u, const Candidate& v) {
        return u.ratio < v.ratio || (u.ratio == v.ratio && u.j < v.j);
      });

      double slope = std::abs(x[leaving] - target);
      std::size_t stop = cands.size() - 1;
      for (std::size_t c = 0; c < cands.size(); ++c) {
        const double range = upper[cands[c].j] - lower[cands[c].j];
        if (slope - cands[c].abs_alpha * range <= opt.primal_tol) {
          stop = c;
          break;
        }
        slope -= cands[c].abs_alpha * range;
        if (c + 1 == cands.size()) stop = cands.size();
      }
      if (stop == cands.size()) {
        // Every breakpoint can be passed: the row cannot be repaired.
        if (!etas.empty() || since_refactor > 0) {
          fresh_start();
          since_refactor = 0;
          continue;
        }
        return LpStatus::Infeasible;
      }
      // Among near-ties at the stopping breakpoint take the largest pivot.
      std::size_t choice = stop;
      const double bound_ratio = cands[stop].ratio + opt.dual_tol / cands[stop].abs_alpha;
      for (std::size_t c = stop + 1; c < cands.size() && cands[c].ratio <= bound_ratio; ++c)
        if (cands[c].abs_alpha > cands[choice].abs_alpha) choice = c;
      const int q = cands[choice].j;
      const double alpha_q = alpha_of(q);
      const double theta_d = d[q] / alpha_q;

      // Column of the entering variable.
      std::fill(alpha_col.begin(), alpha_col.end(), 0.0);
      if (q < n) {
        for (int r = a.start[q]; r < a.start[q + 1]; ++r) alpha_col[a.index[r]] = a.value[r];
      } else {
        alpha_col[q - n] = -1.0;
      }
      ftran(alpha_col);
      if (std::abs(alpha_col[p] - alpha_q) > 1e-6 * (1.0 + std::abs(alpha_q)) || std::abs(alpha_col[p]) < 1e-11) {
        fresh_start();
        since_refactor = 0;
        continue;
      }

      // Dual update.
      for (int j : touched)
        if (status[j] != kBasic) d[j] -= theta_d * alpha_row[j];
      for (int i : rho_nz)
        if (status[n + i] != kBasic) d[n + i] += theta_d * rho[i];
      d[q] = 0.0;
      d[leaving] = -theta_d;

      // Bound flips for the breakpoints passed.
      bool any_flip = false;
      std::fill(flip_rhs.begin(), flip_rhs.end(), 0.0);
      for (std::size_t c = 0; c < stop; ++c) {
        const int j = cands[c].j;
        if (j == q) continue;
        const double old = x[j];
        status[j] = status[j] == kAtLower ? kAtUpper : kAtLower;
        place_nonbasic(j);
        const double delta = x[j] - old;
        if (delta == 0.0) continue;
        any_flip = true;
        if (j < n) {
          for (int r = a.start[j]; r < a.start[j + 1]; ++r) flip_rhs[a.index[r]] -= a.value[r] * delta;
        } else {
          flip_rhs[j - n] += delta;
        }
      }
      if (any_flip) {
        ftran(flip_rhs);
        for (int r = 0; r < m; ++r) x[basic[r]] += flip_rhs[r];
        flip_rhs.assign(m, 0.0);
      }

      // Steepest-edge reference vector.
      tau = rho;
      const double rho_norm = std::inner_product(rho.begin(), rho.end(), rho.begin(), 0.0);
      {
        std::vector<double> tmp(rho);
        // tau = B^{-1} rho, with rho given in row space.
        ftran(tmp);
        tau.swap(tmp);
      }
      if (limits.budget) limits.budget->charge(2.0 * solve_cost() + 4.0 * m + static_cast<double>(touched.size()));

      // Primal update.
      const double ap = alpha_col[p];
      const double theta_p = (x[leaving] - target) / ap;
      for (int r = 0; r < m; ++r)
        if (alpha_col[r] != 0.0) x[basic[r]] -= theta_p * alpha_col[r];
      x[q] += theta_p;
      x[leaving] = target;

      // Weight update.
      const double wp = std::max(rho_norm, 1e-12);
      for (int r = 0; r < m; ++r) {
        if (r == p || alpha_col[r] == 0.0) continue;
        const double ratio = alpha_col[r] / ap;
        weight[r] = std::max(weight[r] + ratio * (ratio * wp - 2.0 * tau[r]), 1e-6);
      }
      weight[p] = std::max(wp / (ap * ap), 1e-6);

      // Basis update.
      Eta eta;
      eta.pos = p;
      eta.pivot = ap;
      for (int r = 0; r < m; ++r)
        if (r != p && alpha_col[r] != 0.0) {
          eta.index.push_back(r);
          eta.value.push_back(alpha_col[r]);
        }
      etas.push_back(std::move(eta));
      status[leaving] = to_upper ? kAtUpper : kAtLower;
      pos[leaving] = -1;
      basic[p] = q;
      pos[q] = p;
      status[q] = kBasic;
      ++iters;
      ++since_refactor;
    }
  }

  LpStatus solve(const LpRunLimits& limits) {
    if (bounds_conflict) return LpStatus::Infeasible;
    for (int j = 0; j < n; ++j)
      if (lower[j] > upper[j]) return LpStatus::Infeasible;
    unperturb();
    fresh_start();
    if (opt.perturbation > 0.0) {
      perturb();
      compute_duals();
      restore_dual_feasibility();
      compute_primal();
    }
    LpStatus st = iterate(limits);
    if (perturbed) {
      unperturb();
      compute_duals();
      if (st == LpStatus::Optimal) {
        restore_dual_feasibility();
        compute_primal();
        st = iterate(limits);
      }
    }
    return st;
  }
};

DualSimplex::DualSimplex(const LpProblem& lp, DualSimplexOptions options)
    : impl_(std::make_unique<Impl>(lp, options)) {}
DualSimplex::~DualSimplex() = default;
DualSimplex::DualSimplex(DualSimplex&&) noexcept = default;
DualSimplex& DualSimplex::operator=(DualSimplex&&) noexcept = default;

int DualSimplex::rows() const { return impl_->m; }
int DualSimplex::cols() const { return impl_->n; }

void DualSimplex::set_col_bounds(int j, double lower, double upper) {
  impl_->lower[j] = std::isfinite(lower) ? lower : -kBoxFallback;
  impl_->upper[j] = std::isfinite(upper) ? upper : kBoxFallback;
}

double DualSimplex::col_lower(int j) const { return impl_->lower[j]; }
double DualSimplex::col_upper(int j) const { return impl_->upper[j]; }

LpStatus DualSimplex::solve(const LpRunLimits& limits) { return impl_->solve(limits); }

double DualSimplex::objective() const { return impl_->objective(); }
double DualSimplex::dual_bound() const { return impl_->lagrangian(); }

std::vector<double> DualSimplex::primal() const {
  return {impl_->x.begin(), impl_->x.begin() + impl_->n};
}

long DualSimplex::iterations() const { return impl_->iters; }
long DualSimplex::refactorizations() const { return impl_->refactors; }

}  // namespace prpmi
