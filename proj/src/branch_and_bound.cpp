#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <set>
#include <stdexcept>

#include "prpmi/dense_simplex.hpp"
#include "prpmi/dual_simplex.hpp"
#include "prpmi/solver.hpp"

namespace prpmi {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::Feasible:
      return "Feasible";
    case SolveStatus::FeasibleTimeLimit:
      return "FeasibleTimeLimit";
    case SolveStatus::NoIncumbent:
      return "NoIncumbent";
    case SolveStatus::Infeasible:
      return "Infeasible";
    case SolveStatus::Unbounded:
      return "Unbounded";
    case SolveStatus::Error:
      return "Error";
  }
  return "?";
}

double relative_gap(double upper, double lower) {
  const double diff = upper - lower;
  if (diff <= 0.0) return 0.0;
  if (upper <= 0.0) return 1.0;
  return std::min(1.0, diff / upper);
}

std::optional<double> SolveOutcome::gap() const {
  if (!value) return std::nullopt;
  return relative_gap(*value, bound);
}

double incumbent_violation(const MilpModel& model, std::vector<double>& x) {
  for (VarId j = 0; j < model.variable_count(); ++j) {
    const Variable& v = model.variable(j);
    if (v.type == VarType::Binary) x[j] = std::round(x[j]);
    x[j] = std::clamp(x[j], v.lower, v.upper);
  }
  return model.max_violation(x);
}

namespace {

constexpr double kIntTol = 1e-6;
constexpr double kFeasTol = 1e-6;
constexpr double kUnboundedMark = 1e9 * (1.0 - 1e-9);

// Common face of the two LP engines used by the search.
class NodeLp {
 public:
  virtual ~NodeLp() = default;
  virtual void set_bounds(int j, double lo, double hi) = 0;
  virtual LpStatus solve(WorkBudget& budget, double cutoff) = 0;
  virtual double objective() const = 0;
  virtual std::vector<double> primal() const = 0;
  virtual long iterations() const = 0;
};

class DualNodeLp final : public NodeLp {
 public:
  DualNodeLp(const MilpModel& model, bool parallel) {
    DualSimplexOptions opt;
    opt.parallel = parallel;
    lp_ = std::make_unique<DualSimplex>(LpProblem::from_model(model), opt);
  }
  void set_bounds(int j, double lo, double hi) override { lp_->set_col_bounds(j, lo, hi); }
  LpStatus solve(WorkBudget& budget, double cutoff) override {
    LpRunLimits lim;
    lim.budget = &budget;
    lim.cutoff = cutoff;
    return lp_->solve(lim);
  }
  double objective() const override { return lp_->objective(); }
  std::vector<double> primal() const override { return lp_->primal(); }
  long iterations() const override { return lp_->iterations(); }

 private:
  std::unique_ptr<DualSimplex> lp_;
};

class DenseNodeLp final : public NodeLp {
 public:
  explicit DenseNodeLp(const MilpModel& model) : lp_(DenseLp::from_model(model)) {}
  void set_bounds(int j, double lo, double hi) override {
    lp_.lower[j] = lo;
    lp_.upper[j] = hi;
  }
  LpStatus solve(WorkBudget& budget, double) override {
    if (budget.exhausted()) return LpStatus::Limit;
    for (int j = 0; j < lp_.n; ++j)
      if (lp_.lower[j] > lp_.upper[j]) return LpStatus::Infeasible;
    res_ = solve_dense(lp_);
    pivots_ += res_.pivots;
    budget.charge(static_cast<double>(res_.pivots + 1) * (lp_.rows.size() + 1) * (lp_.n + 1));
    return res_.status;
  }
  double objective() const override { return res_.objective; }
  std::vector<double> primal() const override { return res_.x; }
  long iterations() const override { return pivots_; }

 private:
  DenseLp lp_;
  DenseResult res_;
  long pivots_ = 0;
};

struct BoundChange {
  int var;
  double lo, hi;
};

struct Node {
  long id = 0;
  double bound = -kInfinity;
  std::vector<BoundChange> changes;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    return a.bound < b.bound || (a.bound == b.bound && a.id < b.id);
  }
};

class Search {
 public:
  Search(const MilpModel& model, const SolveLimits& limits, const ReferenceOptions& options)
      : model_(model), limits_(limits), options_(options) {
    start_ = std::chrono::steady_clock::now();
    const auto deadline = start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                       std::chrono::duration<double>(limits.wall_clock));
    budget_ = WorkBudget(limits.work_limit, deadline);
    const int n = model.variable_count();
    root_lo_.resize(n);
    root_hi_.resize(n);
    for (int j = 0; j < n; ++j) {
      root_lo_[j] = model.variable(j).lower;
      root_hi_[j] = model.variable(j).upper;
    }
  }

  SolveOutcome run() {
    if (model_.trivially_infeasible()) {
      out_.status = SolveStatus::Infeasible;
      out_.diagnostic = "constant row violated: " + model_.constant_conflicts().front();
      return finish();
    }
    if (options_.engine == LpEngine::Dense)
      lp_ = std::make_unique<DenseNodeLp>(model_);
    else
      lp_ = std::make_unique<DualNodeLp>(model_, options_.parallel_kernels);

    if (!options_.start.empty()) try_incumbent(options_.start);

    std::set<Node, NodeOrder> open;
    std::optional<Node> next = Node{next_id_++, -kInfinity, {}};
    bool limit_hit = false;
    bool root = true;
    while (next || !open.empty()) {
      if (budget_.exhausted() || (limits_.node_limit && out_.nodes >= *limits_.node_limit)) {
        limit_hit = true;
        if (next) open.insert(*next);
        break;
      }
      Node node;
      if (next) {
        node = std::move(*next);
        next.reset();
      } else {
        node = *open.begin();
        open.erase(open.begin());
      }
      update_bound(node.bound, open);
      if (closed_by_gap()) {
        open.clear();
        break;
      }
      if (incumbent_ && node.bound >= prune_level()) continue;

      apply(node);
      ++out_.nodes;
      const LpStatus st = lp_->solve(budget_, incumbent_ ? prune_level() : kInfinity);
      if (st == LpStatus::Limit) {
        limit_hit = true;
        open.insert(node);
        break;
      }
      if (st == LpStatus::Numerical) {
        out_.status = SolveStatus::Error;
        out_.diagnostic = "LP relaxation failed numerically at node " + std::to_string(node.id);
        return finish();
      }
      if (st == LpStatus::Unbounded) {
        out_.status = SolveStatus::Unbounded;
        return finish();
      }
      if (st == LpStatus::Infeasible || st == LpStatus::Cutoff) {
        root = false;
        continue;
      }
      const double val = lp_->objective();
      std::vector<double> x = lp_->primal();
      if (root && unbounded_ray(x)) {
        out_.status = SolveStatus::Unbounded;
        out_.diagnostic = "relaxation reached the artificial box on a free variable";
        return finish();
      }
      root = false;
      node.bound = std::max(node.bound, val);
      if (incumbent_ && node.bound >= prune_level()) continue;

      const int branch = most_fractional(x);
      if (branch < 0) {
        polish(x);
        continue;
      }
      Node down{next_id_++, node.bound, node.changes};
      down.changes.push_back({branch, root_lo_[branch], 0.0});
      Node up{next_id_++, node.bound, node.changes};
      up.changes.push_back({branch, 1.0, root_hi_[branch]});
      if (x[branch] >= 0.5) {
        next = std::move(up);
        open.insert(std::move(down));
      } else {
        next = std::move(down);
        open.insert(std::move(up));
      }
    }

    if (limit_hit) {
      double b = kInfinity;
      for (const Node& nd : open) b = std::min(b, nd.bound);
      if (next) b = std::min(b, next->bound);
      if (incumbent_) b = std::min(b, *incumbent_);
      out_.bound = std::max(out_.bound, b);
      out_.hit_wall_clock = budget_.time_exhausted();
      out_.status = incumbent_ ? SolveStatus::FeasibleTimeLimit : SolveStatus::NoIncumbent;
      if (incumbent_ && closed_by_gap()) out_.status = SolveStatus::Optimal;
    } else if (incumbent_) {
      out_.bound = *incumbent_;
      out_.status = SolveStatus::Optimal;
    } else {
      out_.status = SolveStatus::Infeasible;
    }
    return finish();
  }

 private:
  double prune_level() const {
    const double ub = *incumbent_;
    return ub - std::max(1e-9, limits_.gap_tolerance * std::abs(ub));
  }

  bool closed_by_gap() const {
    if (!incumbent_) return false;
    const double ub = *incumbent_;
    return out_.bound >= ub - std::max(1e-9, limits_.gap_tolerance * std::abs(ub));
  }

  void update_bound(double node_bound, const std::set<Node, NodeOrder>& open) {
    double b = node_bound;
    if (!open.empty()) b = std::min(b, open.begin()->bound);
    if (incumbent_) b = std::min(b, *incumbent_);
    if (b > out_.bound) {
      out_.bound = b;
      record();
    }
  }

  void record() {
    if (!options_.record_trace) return;
    out_.trace.push_back({out_.nodes, out_.bound, incumbent_ ? *incumbent_ : kInfinity});
  }

  void apply(const Node& node) {
    for (int j : touched_) {
      lp_->set_bounds(j, root_lo_[j], root_hi_[j]);
      is_touched_[j] = 0;
    }
    touched_.clear();
    if (is_touched_.empty()) is_touched_.assign(root_lo_.size(), 0);
    for (const BoundChange& c : node.changes) {
      lp_->set_bounds(c.var, c.lo, c.hi);
      if (!is_touched_[c.var]) {
        is_touched_[c.var] = 1;
        touched_.push_back(c.var);
      }
    }
  }

  int most_fractional(const std::vector<double>& x) const {
    int best = -1;
    double best_frac = kIntTol;
    for (VarId j = 0; j < model_.variable_count(); ++j) {
      if (model_.variable(j).type != VarType::Binary) continue;
      const double frac = std::abs(x[j] - std::round(x[j]));
      if (frac > best_frac) {
        best_frac = frac;
        best = j;
      }
    }
    return best;
  }

  bool unbounded_ray(const std::vector<double>& x) const {
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (!std::isfinite(root_hi_[j]) && x[j] >= kUnboundedMark) return true;
      if (!std::isfinite(root_lo_[j]) && x[j] <= -kUnboundedMark) return true;
    }
    return false;
  }

  // Fixes the binaries at their rounded values and re-solves so the
  // continuous part is exact for that pattern.
  void polish(const std::vector<double>& x) {
    std::vector<double> probe(x);
    if (incumbent_violation(model_, probe) <= kFeasTol) {
      try_incumbent(std::move(probe));
      return;
    }
    for (VarId j = 0; j < model_.variable_count(); ++j)
      if (model_.variable(j).type == VarType::Binary) {
        const double v = std::round(x[j]);
        lp_->set_bounds(j, v, v);
        if (!is_touched_[j]) {
          is_touched_[j] = 1;
          touched_.push_back(j);
        }
      }
    const LpStatus st = lp_->solve(budget_, kInfinity);
    if (st == LpStatus::Optimal) try_incumbent(lp_->primal());
  }

  void try_incumbent(std::vector<double> x) {
    if (static_cast<int>(x.size()) != model_.variable_count()) return;
    if (incumbent_violation(model_, x) > kFeasTol) return;
    const double val = model_.evaluate_objective(x);
    if (incumbent_ && val >= *incumbent_) return;
    incumbent_ = val;
    out_.value = val;
    out_.x = std::move(x);
    record();
  }

  SolveOutcome finish() {
    if (lp_) out_.lp_iterations = lp_->iterations();
    out_.work = budget_.used();
    out_.hit_wall_clock = out_.hit_wall_clock || budget_.hit_wall_clock();
    if (out_.value) out_.bound = std::min(out_.bound, *out_.value);
    out_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return std::move(out_);
  }

  const MilpModel& model_;
  SolveLimits limits_;
  ReferenceOptions options_;
  std::chrono::steady_clock::time_point start_;
  WorkBudget budget_;
  std::unique_ptr<NodeLp> lp_;
  std::vector<double> root_lo_, root_hi_;
  std::vector<int> touched_;
  std::vector<std::uint8_t> is_touched_;
  std::optional<double> incumbent_;
  long next_id_ = 0;
  SolveOutcome out_;
};

}  // namespace

SolveOutcome solve_reference(const MilpModel& model, const SolveLimits& limits, const ReferenceOptions& options) {
  if (!(limits.wall_clock > 0.0) || !(limits.gap_tolerance >= 0.0))
    throw std::invalid_argument("solve limits must be positive");
  try {
    Search search(model, limits, options);
    return search.run();
  } catch (const std::exception& e) {
    SolveOutcome out;
    out.status = SolveStatus::Error;
    out.diagnostic = e.what();
    return out;
  }
}

}  // namespace prpmi
