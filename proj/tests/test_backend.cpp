#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "wfplan/branch_and_bound.hpp"
#include "wfplan/knapsack.hpp"
#include "wfplan/rng.hpp"
#include "wfplan/simplex.hpp"

using namespace wfplan;

TEST_CASE("lp: single variable maximization against a row bound", "[backend]") {
  LinearModel m;
  const int x = m.add_variable(0.0, kInfinity);
  m.add_row({{x, 1.0}}, Relation::LessEqual, 3.0);
  Vec obj{1.0};
  m.set_objective(ObjSense::Maximize, obj);
  const auto r = solve_lp(m);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.x[0] == Catch::Approx(3.0));
  CHECK(r.objective == Catch::Approx(3.0));
}

TEST_CASE("lp: contradictory rows are infeasible", "[backend]") {
  LinearModel m;
  const int x = m.add_variable(-kInfinity, kInfinity);
  m.add_row({{x, 1.0}}, Relation::LessEqual, 0.0);
  m.add_row({{x, 1.0}}, Relation::GreaterEqual, 1.0);
  m.set_objective(ObjSense::Minimize, {1.0});
  CHECK(solve_lp(m).status == SolveStatus::Infeasible);
}

TEST_CASE("lp: unbounded direction is reported", "[backend]") {
  LinearModel m;
  m.add_variable(0.0, kInfinity);
  m.set_objective(ObjSense::Maximize, {1.0});
  CHECK(solve_lp(m).status == SolveStatus::Unbounded);
}

TEST_CASE("lp: equality and >= rows", "[backend]") {
  LinearModel m;
  const int x = m.add_variable(0.0, 5.0);
  const int y = m.add_variable(0.0, 5.0);
  m.add_row({{x, 1.0}, {y, 1.0}}, Relation::Equal, 2.0);
  m.add_row({{x, 1.0}}, Relation::GreaterEqual, 1.5);
  m.set_objective(ObjSense::Minimize, {1.0, 1.0});
  const auto r = solve_lp(m);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == Catch::Approx(2.0));
  CHECK(r.x[0] >= 1.5 - 1e-9);
}

namespace {

// Exhaustive vertex search: every choice of n active constraints among the
// rows and the finite variable bounds, solved as an n-by-n system and screened
// for feasibility.
double brute_force_lp_min(const Matrix& a, const Vec& b, const Vec& c, const Vec& ub) {
  const int m = static_cast<int>(b.size());
  const int n = static_cast<int>(c.size());
  struct Plane {
    Vec coef;
    double rhs;
  };
  std::vector<Plane> planes;
  for (int i = 0; i < m; ++i) {
    Plane p{Vec(n, 0.0), b[i]};
    for (int j = 0; j < n; ++j) p.coef[j] = a(i, j);
    planes.push_back(std::move(p));
  }
  for (int j = 0; j < n; ++j) {
    Plane lo{Vec(n, 0.0), 0.0};
    lo.coef[j] = 1.0;
    planes.push_back(lo);
    Plane hi{Vec(n, 0.0), ub[j]};
    hi.coef[j] = 1.0;
    planes.push_back(hi);
  }
  double best = kInfinity;
  std::vector<int> pick(n);
  const int total = static_cast<int>(planes.size());
  const auto feasible = [&](const Vec& x) {
    for (int i = 0; i < m; ++i) {
      double dot = 0.0;
      for (int j = 0; j < n; ++j) dot += a(i, j) * x[j];
      if (dot > b[i] + 1e-7) return false;
    }
    for (int j = 0; j < n; ++j)
      if (x[j] < -1e-7 || x[j] > ub[j] + 1e-7) return false;
    return true;
  };
  const auto recurse = [&](auto&& self, int start, int depth) -> void {
    if (depth == n) {
      Matrix sys(n, n);
      Vec rhs(n);
      for (int r = 0; r < n; ++r) {
        for (int j = 0; j < n; ++j) sys(r, j) = planes[pick[r]].coef[j];
        rhs[r] = planes[pick[r]].rhs;
      }
      const auto sol = detail::gauss_solve(sys, rhs, 1e-9);
      if (!sol || !feasible(*sol)) return;
      double obj = 0.0;
      for (int j = 0; j < n; ++j) obj += c[j] * (*sol)[j];
      best = std::min(best, obj);
      return;
    }
    for (int i = start; i <= total - (n - depth); ++i) {
      pick[depth] = i;
      self(self, i + 1, depth + 1);
    }
  };
  recurse(recurse, 0, 0);
  return best;
}

}  // namespace

TEST_CASE("lp: random 5x8 systems match vertex enumeration", "[backend]") {
  Rng rng(2024);
  for (int trial = 0; trial < 3; ++trial) {
    const int m = 5, n = 8;
    Matrix a(m, n);
    Vec ub(n), x0(n), b(m), c(n);
    for (int j = 0; j < n; ++j) {
      ub[j] = 1.0 + rng.uniform01() * 2.0;
      x0[j] = ub[j] * (0.2 + 0.6 * rng.uniform01());
      c[j] = rng.uniform01() * 2.0 - 1.0;
    }
    for (int i = 0; i < m; ++i) {
      double dot = 0.0;
      for (int j = 0; j < n; ++j) {
        a(i, j) = rng.uniform01() * 2.0 - 0.5;
        dot += a(i, j) * x0[j];
      }
      b[i] = dot + rng.uniform01();  // keeps x0 strictly feasible
    }
    LinearModel model;
    for (int j = 0; j < n; ++j) model.add_variable(0.0, ub[j]);
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < n; ++j) row.emplace_back(j, a(i, j));
      model.add_row(std::move(row), Relation::LessEqual, b[i]);
    }
    model.set_objective(ObjSense::Minimize, c);
    const auto r = solve_lp(model);
    REQUIRE(r.status == SolveStatus::Optimal);
    const double oracle = brute_force_lp_min(a, b, c, ub);
    CHECK(r.objective == Catch::Approx(oracle).margin(1e-6));
  }
}

TEST_CASE("lp: weak duality holds for internally produced multipliers", "[backend]") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 3 + static_cast<int>(rng.uniform_int(3));
    const int n = 3 + static_cast<int>(rng.uniform_int(5));
    Matrix a(m, n);
    Vec ub(n), b(m), c(n), x0(n);
    for (int j = 0; j < n; ++j) {
      ub[j] = 1.0 + rng.uniform01();
      x0[j] = 0.5 * ub[j];
      c[j] = rng.uniform01() * 4.0 - 2.0;
    }
    for (int i = 0; i < m; ++i) {
      double dot = 0.0;
      for (int j = 0; j < n; ++j) {
        a(i, j) = rng.uniform01() * 2.0 - 1.0;
        dot += a(i, j) * x0[j];
      }
      b[i] = dot + 0.1 + rng.uniform01();
    }
    LinearModel model;
    for (int j = 0; j < n; ++j) model.add_variable(0.0, ub[j]);
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < n; ++j) row.emplace_back(j, a(i, j));
      model.add_row(std::move(row), Relation::LessEqual, b[i]);
    }
    model.set_objective(ObjSense::Minimize, c);
    const auto r = solve_lp(model);
    REQUIRE(r.status == SolveStatus::Optimal);
    REQUIRE(r.duals.size() == static_cast<std::size_t>(m));
    // Lagrangian bound with multipliers lambda = max(0, -y): valid for any
    // nonnegative lambda, so clamping keeps it a certificate.
    Vec lambda(m);
    for (int i = 0; i < m; ++i) lambda[i] = std::max(0.0, -r.duals[i]);
    double bound = 0.0;
    for (int i = 0; i < m; ++i) bound -= lambda[i] * b[i];
    for (int j = 0; j < n; ++j) {
      double red = c[j];
      for (int i = 0; i < m; ++i) red += lambda[i] * a(i, j);
      bound += std::min(0.0, red * ub[j]);
    }
    CHECK(bound <= r.objective + 1e-6);
  }
}

TEST_CASE("milp: pure LP input behaves exactly like solve_lp", "[backend]") {
  LinearModel m;
  const int x = m.add_variable(0.0, 10.0);
  const int y = m.add_variable(0.0, 10.0);
  m.add_row({{x, 1.0}, {y, 2.0}}, Relation::LessEqual, 7.0);
  m.set_objective(ObjSense::Maximize, {3.0, 5.0});
  const auto lp = solve_lp(m);
  const auto milp = solve_milp(m);
  REQUIRE(lp.status == SolveStatus::Optimal);
  REQUIRE(milp.status == SolveStatus::Optimal);
  CHECK(milp.objective == Catch::Approx(lp.objective));
}

TEST_CASE("milp: 0/1 knapsack solves to the enumerated optimum", "[backend]") {
  LinearModel m;
  for (int j = 0; j < 3; ++j) m.add_variable(0.0, 1.0, true);
  m.add_row({{0, 5.0}, {1, 4.0}, {2, 3.0}}, Relation::LessEqual, 7.0);
  m.set_objective(ObjSense::Maximize, {10.0, 6.0, 4.0});
  const auto r = solve_milp(m);
  REQUIRE(r.status == SolveStatus::Optimal);

  double oracle = 0.0;
  const Vec value{10.0, 6.0, 4.0}, weight{5.0, 4.0, 3.0};
  for (int mask = 0; mask < 8; ++mask) {
    double v = 0.0, w = 0.0;
    for (int j = 0; j < 3; ++j)
      if (mask & (1 << j)) {
        v += value[j];
        w += weight[j];
      }
    if (w <= 7.0) oracle = std::max(oracle, v);
  }
  CHECK(oracle == Catch::Approx(10.0));
  CHECK(r.objective == Catch::Approx(oracle).margin(1e-9));
}

TEST_CASE("milp: integer infeasible but LP feasible", "[backend]") {
  LinearModel m;
  m.add_variable(0.2, 0.8, true);
  m.set_objective(ObjSense::Minimize, {1.0});
  CHECK(solve_milp(m).status == SolveStatus::Infeasible);
}

TEST_CASE("milp: deterministic across repeated solves", "[backend]") {
  Rng rng(5);
  LinearModel m;
  for (int j = 0; j < 6; ++j) m.add_variable(0.0, 3.0, true);
  for (int i = 0; i < 3; ++i) {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < 6; ++j) row.emplace_back(j, std::floor(rng.uniform01() * 5.0));
    m.add_row(std::move(row), Relation::LessEqual, 10.0);
  }
  Vec obj(6);
  for (auto& v : obj) v = std::floor(rng.uniform01() * 9.0);
  m.set_objective(ObjSense::Maximize, obj);
  const auto r1 = solve_milp(m);
  const auto r2 = solve_milp(m);
  REQUIRE(r1.status == r2.status);
  CHECK(r1.objective == r2.objective);
  CHECK(r1.x == r2.x);
  CHECK(r1.iterations == r2.iterations);
}

namespace {

PlanningInstance recourse_instance(const Vec& h, const Vec& beta, const Vec& delta) {
  PlanningInstance inst;
  inst.n = static_cast<int>(h.size());
  inst.h = h;
  inst.beta = beta;
  inst.delta = delta;
  inst.gamma.assign(inst.n, 0.0);
  inst.c.assign(inst.n, 1.0);
  inst.b.assign(inst.n, 1.0);
  inst.C = inst.B = static_cast<double>(inst.n);
  inst.W = 100.0;
  return inst;
}

double enumerate_recourse(const PlanningInstance& inst, const std::vector<int>& x,
                          const std::vector<int>& y, const Vec& u, double budget,
                          std::vector<int>* argmin = nullptr) {
  const int n = inst.n;
  std::vector<long> cap(n);
  for (int i = 0; i < n; ++i) cap[i] = x[i] ? static_cast<long>(std::floor(u[i] + 1e-9)) : 0;
  std::vector<int> z(n, 0);
  double best = kInfinity;
  const auto eval = [&]() {
    double spend = 0.0, cost = 0.0;
    for (int i = 0; i < n; ++i) {
      spend += inst.delta[i] * z[i];
      cost += inst.h[i] * (1.0 - inst.beta[i] * y[i]) * (u[i] - z[i]);
    }
    if (spend <= budget + 1e-9 && cost < best - 1e-12) {
      best = cost;
      if (argmin) *argmin = z;
    }
  };
  const auto recurse = [&](auto&& self, int i) -> void {
    if (i == n) {
      eval();
      return;
    }
    for (long k = 0; k <= cap[i]; ++k) {
      z[i] = static_cast<int>(k);
      self(self, i + 1);
    }
    z[i] = 0;
  };
  recurse(recurse, 0);
  return best;
}

}  // namespace

TEST_CASE("recourse knapsack: zero budget leaves every ignition unmitigated", "[backend]") {
  const auto inst = recourse_instance({2.0, 3.0}, {0.5, 0.0}, {1.0, 1.0});
  const std::vector<int> x{1, 1}, y{1, 0};
  const Vec u{2.0, 1.0};
  const auto out = solve_recourse_knapsack(inst, x, y, u, 0.0);
  CHECK(out.decision.z == std::vector<int>{0, 0});
  // 2*(1-0.5)*2 + 3*1 = 5
  CHECK(out.cost == Catch::Approx(5.0));
  CHECK_FALSE(out.milp_fallback);
}

TEST_CASE("recourse knapsack: three-segment case matches enumeration", "[backend]") {
  const auto inst = recourse_instance({5.0, 3.0, 1.0}, {0.5, 0.0, 0.0}, {1.0, 1.0, 1.0});
  const std::vector<int> x{1, 1, 1}, y{1, 0, 0};
  const Vec u{2.0, 1.0, 2.0};
  std::vector<int> oracle_z;
  const double oracle = enumerate_recourse(inst, x, y, u, 2.0, &oracle_z);
  CHECK(oracle == Catch::Approx(4.5));
  CHECK(oracle_z == std::vector<int>{1, 1, 0});

  const auto out = solve_recourse_knapsack(inst, x, y, u, 2.0);
  CHECK(out.cost == Catch::Approx(oracle).margin(1e-9));
  CHECK(out.decision.z == oracle_z);
}

TEST_CASE("recourse knapsack: no sectionalization means no shutoffs", "[backend]") {
  const auto inst = recourse_instance({5.0, 3.0}, {0.0, 0.0}, {1.0, 1.0});
  const auto out = solve_recourse_knapsack(inst, {0, 0}, {0, 0}, {4.0, 2.0}, 10.0);
  CHECK(out.decision.z == std::vector<int>{0, 0});
  CHECK(out.cost == Catch::Approx(5.0 * 4.0 + 3.0 * 2.0));
}

TEST_CASE("recourse knapsack: random instances match enumeration", "[backend]") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_int(4));
    Vec h(n), beta(n), delta(n), u(n);
    std::vector<int> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      h[i] = std::floor(rng.uniform01() * 10.0) / 2.0;
      beta[i] = std::floor(rng.uniform01() * 5.0) / 5.0;
      delta[i] = std::floor(rng.uniform01() * 20.0) / 10.0;
      u[i] = std::floor(rng.uniform01() * 4.0);
      x[i] = static_cast<int>(rng.uniform_int(2));
      y[i] = x[i] ? static_cast<int>(rng.uniform_int(2)) : 0;
    }
    const auto inst = recourse_instance(h, beta, delta);
    const double budget = rng.uniform01() * 4.0;
    const double oracle = enumerate_recourse(inst, x, y, u, budget);
    const auto out = solve_recourse_knapsack(inst, x, y, u, budget);
    CHECK(out.cost == Catch::Approx(oracle).margin(1e-9));
  }
}

TEST_CASE("recourse knapsack: fine weight grid falls back to branch-and-bound", "[backend]") {
  const auto inst = recourse_instance({3.0, 1.0}, {0.0, 0.0}, {1.0 / 3.0, 0.25});
  const std::vector<int> x{1, 1}, y{0, 0};
  const Vec u{3.0, 3.0};
  const auto out = solve_recourse_knapsack(inst, x, y, u, 1.0);
  CHECK(out.milp_fallback);
  const double oracle = enumerate_recourse(inst, x, y, u, 1.0);
  CHECK(out.cost == Catch::Approx(oracle).margin(1e-9));
}

TEST_CASE("linear model: dump format is deterministic and complete", "[backend]") {
  LinearModel m;
  const int x = m.add_variable(0.0, 4.0, true, "z0");
  const int w = m.add_variable(0.0, kInfinity);
  m.add_row({{x, 2.0}, {w, -1.0}}, Relation::LessEqual, 3.0, "cap");
  m.set_objective(ObjSense::Minimize, {1.5, -2.0}, 7.0);
  const std::string dump = m.dump();
  CHECK(dump.find("minimize") != std::string::npos);
  CHECK(dump.find("cap:") != std::string::npos);
  CHECK(dump.find("z0") != std::string::npos);
  CHECK(dump.find("integer") != std::string::npos);
  CHECK(dump == m.dump());
}
