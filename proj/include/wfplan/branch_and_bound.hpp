#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "wfplan/simplex.hpp"

namespace wfplan {

struct MilpOptions {
  double gap_tol = 1e-6;
  long node_limit = 500000;
  double int_tol = 1e-6;
  LpOptions lp;
};

namespace detail {

struct BnbNode {
  double bound;  // parent LP value (min form); valid lower bound for subtree
  long id;
  Vec lo, hi;
};

struct BnbNodeOrder {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.id > b.id;
  }
};

inline int most_fractional(const std::vector<int>& int_vars, const Vec& x, double int_tol) {
  int pick = -1;
  double best = int_tol;
  for (int j : int_vars) {
    const double f = x[j] - std::floor(x[j]);
    const double dist = std::min(f, 1.0 - f);
    if (dist > best) {
      best = dist;
      pick = j;
    }
  }
  return pick;
}

}  // namespace detail

/// Branch-and-bound over LP relaxations. Best-first on the node bound,
/// branching on the most fractional integer variable (ties to the lowest
/// index), fully deterministic. Requires finite bounds on every integer
/// variable.
inline SolveResult solve_milp(const LinearModel& model, MilpOptions opts = {}) {
  std::vector<int> int_vars;
  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.variables()[j].integral) {
      if (model.variables()[j].lower == -kInfinity || model.variables()[j].upper == kInfinity)
        throw std::invalid_argument("solve_milp: integer variables must have finite bounds");
      int_vars.push_back(j);
    }
  }

  detail::SimplexSolver solver(model);
  const double sign = model.sense() == ObjSense::Minimize ? 1.0 : -1.0;

  SolveResult root = solver.solve(opts.lp);
  root.duals.clear();
  if (root.status != SolveStatus::Optimal) return root;
  if (int_vars.empty()) {
    root.gap = 0.0;
    return root;
  }

  const auto mval = [sign](const SolveResult& r) { return sign * r.objective; };

  bool have_incumbent = false;
  Vec inc_x;
  double inc_mobj = kInfinity;
  long nodes = 0;

  const auto offer_incumbent = [&](const Vec& x) {
    Vec snapped = x;
    for (int j : int_vars) snapped[j] = std::round(snapped[j]);
    double obj = model.objective_offset();
    for (int j = 0; j < model.num_variables(); ++j) obj += model.objective()[j] * snapped[j];
    const double m = sign * obj;
    if (!have_incumbent || m < inc_mobj - 1e-12) {
      have_incumbent = true;
      inc_mobj = m;
      inc_x = std::move(snapped);
    }
  };

  // Root rounding heuristics: fix each integer variable to a rounded value
  // and let the LP fill in the continuous part. Either attempt may fail;
  // any success seeds the incumbent so best-first search can prune early.
  const auto try_rounding = [&](bool to_nearest) {
    Vec lo = solver.default_lower(), hi = solver.default_upper();
    for (int j : int_vars) {
      const double lo_int = std::ceil(lo[j] - opts.int_tol);
      const double hi_int = std::floor(hi[j] + opts.int_tol);
      if (lo_int > hi_int) return;  // no integer point in range at all
      double v = to_nearest ? std::round(root.x[j]) : std::floor(root.x[j] + opts.int_tol);
      v = std::min(std::max(v, lo_int), hi_int);
      lo[j] = hi[j] = v;
    }
    SolveResult r = solver.solve(lo, hi, opts.lp);
    if (r.status == SolveStatus::Optimal) offer_incumbent(r.x);
  };
  try_rounding(true);
  try_rounding(false);

  std::priority_queue<detail::BnbNode, std::vector<detail::BnbNode>, detail::BnbNodeOrder> open;
  long next_id = 0;
  open.push({mval(root), next_id++, solver.default_lower(), solver.default_upper()});

  double certified_lb = mval(root);
  SolveStatus final_status = SolveStatus::Optimal;

  while (!open.empty()) {
    const double best_open = open.top().bound;
    if (have_incumbent && best_open >= inc_mobj - opts.gap_tol) {
      certified_lb = best_open;
      break;
    }
    if (nodes >= opts.node_limit) {
      certified_lb = best_open;
      final_status = SolveStatus::IterationLimit;
      break;
    }
    detail::BnbNode node = open.top();
    open.pop();
    ++nodes;

    SolveResult rel = solver.solve(node.lo, node.hi, opts.lp);
    if (rel.status == SolveStatus::Infeasible) continue;
    if (rel.status != SolveStatus::Optimal) {
      // Relaxation hit the pivot cap: keep its parent bound and give up on
      // certifying this subtree.
      final_status = SolveStatus::IterationLimit;
      certified_lb = node.bound;
      break;
    }
    const double value = mval(rel);
    if (have_incumbent && value >= inc_mobj - opts.gap_tol) continue;

    const int branch_var = detail::most_fractional(int_vars, rel.x, opts.int_tol);
    if (branch_var < 0) {
      offer_incumbent(rel.x);
      continue;
    }

    const double down = std::floor(rel.x[branch_var]);
    detail::BnbNode left{value, next_id++, node.lo, node.hi};
    left.hi[branch_var] = down;
    detail::BnbNode right{value, next_id++, std::move(node.lo), std::move(node.hi)};
    right.lo[branch_var] = down + 1.0;
    if (left.lo[branch_var] <= left.hi[branch_var]) open.push(std::move(left));
    if (right.lo[branch_var] <= right.hi[branch_var]) open.push(std::move(right));
  }

  SolveResult res;
  res.iterations = nodes;
  if (!have_incumbent) {
    res.status = final_status == SolveStatus::IterationLimit ? SolveStatus::IterationLimit
                                                             : SolveStatus::Infeasible;
    res.gap = kInfinity;
    return res;
  }
  if (open.empty()) certified_lb = inc_mobj;
  res.status = final_status;
  res.x = inc_x;
  res.objective = sign * inc_mobj;
  res.gap = std::max(0.0, inc_mobj - certified_lb);
  res.has_solution = true;
  return res;
}

}  // namespace wfplan
