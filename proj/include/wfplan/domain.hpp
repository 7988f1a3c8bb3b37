#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "wfplan/linalg.hpp"

namespace wfplan {

/// Static data of one planning problem over n controllable line segments.
///
/// Per segment: h = consequence weight of an ignition, beta = ignition
/// reduction when fast-trip protection is enabled, gamma/delta = reliability
/// impact of fast-trip configuration and of one shutoff action, c/b =
/// sectionalization and fast-trip investment costs. C, B cap the investment
/// budgets and W caps the total reliability impact.
struct PlanningInstance {
  int n = 0;
  Vec h, beta, gamma, delta, c, b;
  double C = 0.0, B = 0.0, W = 0.0;
};

/// Real-valued ignition counts per segment over one operational window.
struct IgnitionScenario {
  Vec u;
};

/// First-stage decisions: x = sectionalization, y = fast-trip configuration.
struct PlanDecision {
  std::vector<int> x, y;
};

/// Operational recourse: z = shutoff counts, w = linearization auxiliaries
/// standing in for y_i * z_i.
struct RecourseDecision {
  std::vector<int> z;
  Vec w;
};

namespace detail {

inline bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

inline void check_vector(const Vec& v, int n, const char* name,
                         std::vector<std::string>& out) {
  if (static_cast<int>(v.size()) != n) {
    out.push_back(std::string(name) + ": expected length " + std::to_string(n) +
                  ", got " + std::to_string(v.size()));
    return;
  }
  for (int i = 0; i < n; ++i) {
    if (!finite_nonneg(v[i]))
      out.push_back(std::string(name) + "[" + std::to_string(i) +
                    "]: must be finite and nonnegative");
  }
}

}  // namespace detail

/// Checks every structural invariant of an instance. Returns one human-readable
/// violation per problem, naming the offending field and index; empty means
/// the instance is usable.
inline std::vector<std::string> validate_instance(const PlanningInstance& inst) {
  std::vector<std::string> violations;
  if (inst.n < 0) violations.push_back("n: must be nonnegative");
  const int n = inst.n;
  detail::check_vector(inst.h, n, "h", violations);
  detail::check_vector(inst.beta, n, "beta", violations);
  detail::check_vector(inst.gamma, n, "gamma", violations);
  detail::check_vector(inst.delta, n, "delta", violations);
  detail::check_vector(inst.c, n, "c", violations);
  detail::check_vector(inst.b, n, "b", violations);
  if (static_cast<int>(inst.beta.size()) == n) {
    for (int i = 0; i < n; ++i)
      if (std::isfinite(inst.beta[i]) && inst.beta[i] > 1.0)
        violations.push_back("beta[" + std::to_string(i) + "]: must be at most 1");
  }
  if (!detail::finite_nonneg(inst.C)) violations.push_back("C: must be finite and nonnegative");
  if (!detail::finite_nonneg(inst.B)) violations.push_back("B: must be finite and nonnegative");
  if (!detail::finite_nonneg(inst.W)) violations.push_back("W: must be finite and nonnegative");
  return violations;
}

/// Plan feasibility (budgets and the y <= x gating).
inline std::vector<std::string> validate_plan(const PlanningInstance& inst,
                                              const PlanDecision& plan,
                                              double tol = 1e-9) {
  std::vector<std::string> violations;
  const int n = inst.n;
  if (static_cast<int>(plan.x.size()) != n || static_cast<int>(plan.y.size()) != n) {
    violations.push_back("plan: x/y length mismatch");
    return violations;
  }
  double cx = 0.0, by = 0.0;
  for (int i = 0; i < n; ++i) {
    if (plan.x[i] != 0 && plan.x[i] != 1)
      violations.push_back("x[" + std::to_string(i) + "]: must be binary");
    if (plan.y[i] != 0 && plan.y[i] != 1)
      violations.push_back("y[" + std::to_string(i) + "]: must be binary");
    if (plan.y[i] > plan.x[i])
      violations.push_back("y[" + std::to_string(i) + "]: requires x[" + std::to_string(i) + "]");
    cx += inst.c[i] * plan.x[i];
    by += inst.b[i] * plan.y[i];
  }
  if (cx > inst.C + tol) violations.push_back("c.x exceeds budget C");
  if (by > inst.B + tol) violations.push_back("b.y exceeds budget B");
  return violations;
}

/// Residual impact sum_i h_i (1 - beta_i y_i)(u_i - z_i). Negative terms are
/// not clamped, so infeasible z (z_i > u_i) shows up as a negative
/// contribution rather than being masked.
inline double objective_value(const PlanningInstance& inst, const std::vector<int>& x,
                              const std::vector<int>& y, const Vec& u,
                              const std::vector<int>& z) {
  const std::size_t n = static_cast<std::size_t>(inst.n);
  if (x.size() != n || y.size() != n || u.size() != n || z.size() != n)
    throw std::invalid_argument("objective_value: dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    total += inst.h[i] * (1.0 - inst.beta[i] * y[i]) * (u[i] - z[i]);
  return total;
}

/// Same objective with real-valued mitigation (used by solver internals where
/// z comes out of an LP relaxation).
inline double objective_value_real(const PlanningInstance& inst, const std::vector<int>& y,
                                   const Vec& u, const Vec& z) {
  double total = 0.0;
  for (int i = 0; i < inst.n; ++i)
    total += inst.h[i] * (1.0 - inst.beta[i] * y[i]) * (u[i] - z[i]);
  return total;
}

}  // namespace wfplan
