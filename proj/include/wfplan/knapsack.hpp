#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "wfplan/branch_and_bound.hpp"
#include "wfplan/domain.hpp"

namespace wfplan {

struct RecourseOutcome {
  RecourseDecision decision;
  double cost = 0.0;          // residual impact after the chosen shutoffs
  bool milp_fallback = false; // set when the weight grid was too fine for DP
};

namespace detail {

/// Finds the smallest power-of-ten scaling (up to 10^4) that makes every
/// weight integral; -1 when none qualifies.
inline int decimal_scale(const Vec& weights) {
  for (int d = 0; d <= 4; ++d) {
    const double s = std::pow(10.0, d);
    bool ok = true;
    for (double w : weights) {
      const double v = w * s;
      if (std::fabs(v - std::round(v)) > 1e-6) {
        ok = false;
        break;
      }
    }
    if (ok) return d;
  }
  return -1;
}

}  // namespace detail

/// Optimal shutoff counts for fixed plan (x, y) and realized scenario u:
/// maximize the mitigated impact sum_i h_i (1 - beta_i y_i) z_i subject to
/// the reliability budget sum_i delta_i z_i <= budget_remaining and
/// 0 <= z_i <= floor(u_i x_i). Exact dynamic program over a decimal weight
/// grid; weights that do not fit a 1e-4 grid fall back to branch-and-bound
/// (flagged in the result). Ties prefer fewer shutoffs per segment.
inline RecourseOutcome solve_recourse_knapsack(const PlanningInstance& inst,
                                               const std::vector<int>& x,
                                               const std::vector<int>& y, const Vec& u,
                                               double budget_remaining) {
  const int n = inst.n;
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n ||
      static_cast<int>(u.size()) != n)
    throw std::invalid_argument("solve_recourse_knapsack: dimension mismatch");
  if (budget_remaining < -1e-9)
    throw std::invalid_argument("solve_recourse_knapsack: negative remaining budget");
  budget_remaining = std::max(budget_remaining, 0.0);

  RecourseOutcome out;
  out.decision.z.assign(n, 0);
  out.decision.w.assign(n, 0.0);

  Vec gain(n);       // value of one shutoff on segment i
  std::vector<long> cap(n);
  double base = 0.0;
  for (int i = 0; i < n; ++i) {
    gain[i] = inst.h[i] * (1.0 - inst.beta[i] * y[i]);
    base += gain[i] * u[i];
    cap[i] = x[i] ? static_cast<long>(std::floor(u[i] * x[i] + 1e-9)) : 0;
  }

  const int scale_pow = detail::decimal_scale(inst.delta);
  long budget = 0, heavy_total = 0;
  std::vector<long> wt(n);
  long max_cap = 0;
  if (scale_pow >= 0) {
    const double s = std::pow(10.0, scale_pow);
    for (int i = 0; i < n; ++i) {
      wt[i] = static_cast<long>(std::llround(inst.delta[i] * s));
      if (wt[i] != 0) heavy_total += wt[i] * cap[i];
      max_cap = std::max(max_cap, cap[i]);
    }
    const double scaled_budget = budget_remaining * s;
    budget = std::fabs(scaled_budget - std::round(scaled_budget)) <= 1e-6
                 ? static_cast<long>(std::llround(scaled_budget))
                 : static_cast<long>(std::floor(scaled_budget));
    budget = std::min(budget, heavy_total);
  }

  if (scale_pow < 0 || budget > 200000 || max_cap > 60000) {
    // Weight grid too fine (or impractically large): solve the same bounded
    // knapsack as a MILP instead.
    out.milp_fallback = true;
    LinearModel model;
    for (int i = 0; i < n; ++i)
      model.add_variable(0.0, static_cast<double>(cap[i]), true, "z" + std::to_string(i));
    std::vector<std::pair<int, double>> row;
    for (int i = 0; i < n; ++i)
      if (inst.delta[i] != 0.0) row.emplace_back(i, inst.delta[i]);
    model.add_row(std::move(row), Relation::LessEqual, budget_remaining, "reliability");
    model.set_objective(ObjSense::Maximize, gain);
    const SolveResult r = solve_milp(model);
    if (r.status != SolveStatus::Optimal)
      throw std::runtime_error("solve_recourse_knapsack: fallback MILP failed");
    double value = 0.0;
    for (int i = 0; i < n; ++i) {
      out.decision.z[i] = static_cast<int>(std::llround(r.x[i]));
      value += gain[i] * out.decision.z[i];
      out.decision.w[i] = y[i] ? out.decision.z[i] : 0.0;
    }
    out.cost = base - value;
    return out;
  }

  // Free items (zero reliability weight) never compete for budget.
  double free_value = 0.0;
  for (int i = 0; i < n; ++i) {
    if (wt[i] == 0 && gain[i] > 0.0) {
      out.decision.z[i] = static_cast<int>(cap[i]);
      free_value += gain[i] * cap[i];
    }
  }

  const std::size_t width = static_cast<std::size_t>(budget) + 1;
  Vec dp(width, 0.0);
  std::vector<std::vector<std::uint16_t>> take(n);
  for (int i = 0; i < n; ++i) {
    if (wt[i] == 0 || cap[i] == 0) continue;
    take[i].assign(width, 0);
    Vec next(width, 0.0);
    for (long w = 0; w < static_cast<long>(width); ++w) {
      double best = dp[w];
      std::uint16_t best_k = 0;
      const long kmax = std::min<long>(cap[i], w / wt[i]);
      for (long k = 1; k <= kmax; ++k) {
        const double v = dp[w - k * wt[i]] + gain[i] * k;
        if (v > best + 1e-12) {
          best = v;
          best_k = static_cast<std::uint16_t>(k);
        }
      }
      next[w] = best;
      take[i][w] = best_k;
    }
    dp.swap(next);
  }

  long w = budget;
  for (int i = n - 1; i >= 0; --i) {
    if (wt[i] == 0 || cap[i] == 0 || take[i].empty()) continue;
    const long k = take[i][w];
    out.decision.z[i] = static_cast<int>(k);
    w -= k * wt[i];
  }
  for (int i = 0; i < n; ++i) out.decision.w[i] = y[i] ? out.decision.z[i] : 0.0;
  out.cost = base - (dp[budget] + free_value);
  return out;
}

}  // namespace wfplan
