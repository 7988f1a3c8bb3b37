#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <vector>

#include "wfplan/linear_model.hpp"

namespace wfplan {

struct LpOptions {
  double feas_tol = 1e-7;
  long max_iters = 100000;
};

namespace detail {

// Bounded-variable primal simplex on a dense tableau.
//
// The model is brought to equality form with one slack column per row
// (<=: s in [0,inf), >=: s in (-inf,0], =: s fixed at 0) and solved in two
// phases. Phase 1 relaxes the bounds of out-of-range basic slacks just enough
// to admit the starting point and minimizes the total excursion; the working
// bounds cap each violating variable exactly at its true bound, so the
// phase-1 objective is linear and reaches zero iff the model is feasible.
// Phase 2 minimizes the true cost. Dantzig pricing with a Bland's-rule
// fallback after a run of degenerate steps guarantees termination.
//
// One instance can be solved repeatedly under different structural variable
// bounds (branch-and-bound nodes) without rebuilding the constraint matrix.
class SimplexSolver {
 public:
  explicit SimplexSolver(const LinearModel& model)
      : n_(model.num_variables()), m_(model.num_rows()), ntot_(n_ + m_), a_(m_, n_ + m_) {
    b_.resize(m_);
    slack_lo_.resize(m_);
    slack_hi_.resize(m_);
    const auto& rows = model.rows();
    for (int i = 0; i < m_; ++i) {
      for (const auto& [j, v] : rows[i].coeffs) a_(i, j) += v;
      a_(i, n_ + i) = 1.0;
      b_[i] = rows[i].rhs;
      switch (rows[i].rel) {
        case Relation::LessEqual: slack_lo_[i] = 0.0; slack_hi_[i] = kInfinity; break;
        case Relation::GreaterEqual: slack_lo_[i] = -kInfinity; slack_hi_[i] = 0.0; break;
        case Relation::Equal: slack_lo_[i] = 0.0; slack_hi_[i] = 0.0; break;
      }
    }
    obj_sign_ = model.sense() == ObjSense::Minimize ? 1.0 : -1.0;
    cost_.assign(ntot_, 0.0);
    for (int j = 0; j < n_; ++j) cost_[j] = obj_sign_ * model.objective()[j];
    offset_ = model.objective_offset();
    cost_scale_ = 1.0;
    for (int j = 0; j < n_; ++j) cost_scale_ = std::max(cost_scale_, std::fabs(cost_[j]));
    default_lo_.resize(n_);
    default_hi_.resize(n_);
    for (int j = 0; j < n_; ++j) {
      default_lo_[j] = model.variables()[j].lower;
      default_hi_[j] = model.variables()[j].upper;
    }
  }

  int num_structural() const { return n_; }
  const Vec& default_lower() const { return default_lo_; }
  const Vec& default_upper() const { return default_hi_; }

  SolveResult solve(const LpOptions& opts) { return solve(default_lo_, default_hi_, opts); }

  SolveResult solve(const Vec& lo_struct, const Vec& hi_struct, const LpOptions& opts) {
    SolveResult res;
    lo_.assign(ntot_, 0.0);
    hi_.assign(ntot_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lo_struct[j];
      hi_[j] = hi_struct[j];
      if (lo_[j] > hi_[j] + 1e-12) {
        res.status = SolveStatus::Infeasible;
        return res;
      }
      if (lo_[j] > hi_[j]) hi_[j] = lo_[j];  // collapse float-level inversions
    }
    for (int i = 0; i < m_; ++i) {
      lo_[n_ + i] = slack_lo_[i];
      hi_[n_ + i] = slack_hi_[i];
    }

    tab_ = a_;
    basis_.resize(m_);
    where_.assign(ntot_, -1);
    vstat_.assign(ntot_, AtLower);
    val_.assign(ntot_, 0.0);
    xb_.assign(m_, 0.0);
    iters_ = 0;
    degen_run_ = 0;
    bland_ = false;

    for (int j = 0; j < n_; ++j) {
      if (lo_[j] > -kInfinity) {
        vstat_[j] = AtLower;
        val_[j] = lo_[j];
      } else if (hi_[j] < kInfinity) {
        vstat_[j] = AtUpper;
        val_[j] = hi_[j];
      } else {
        vstat_[j] = FreeNB;
        val_[j] = 0.0;
      }
    }
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      where_[n_ + i] = i;
      vstat_[n_ + i] = Basic;
    }
    for (int i = 0; i < m_; ++i) {
      double acc = b_[i];
      const double* row = a_.row(i);
      for (int j = 0; j < n_; ++j) acc -= row[j] * val_[j];
      xb_[i] = acc;
    }

    // Phase 1: relax the bounds of each out-of-range basic variable just
    // enough to admit the starting point and charge its excursion with a
    // unit cost. Whenever a charged variable re-enters its true range its
    // bounds are restored and its charge dropped (see maybe_restore), so the
    // phase-1 optimum is zero exactly when the model is feasible.
    const double ftol = opts.feas_tol;
    work_lo_ = lo_;
    work_hi_ = hi_;
    p1cost_.assign(ntot_, 0.0);
    bool need_phase1 = false;
    for (int i = 0; i < m_; ++i) {
      const int k = basis_[i];
      if (xb_[i] > hi_[k] + ftol) {
        work_lo_[k] = hi_[k];
        work_hi_[k] = xb_[i];
        p1cost_[k] = 1.0;
        need_phase1 = true;
      } else if (xb_[i] < lo_[k] - ftol) {
        work_lo_[k] = xb_[i];
        work_hi_[k] = lo_[k];
        p1cost_[k] = -1.0;
        need_phase1 = true;
      }
    }
    if (need_phase1) {
      const RunOutcome out = run_phase(p1cost_, work_lo_, work_hi_, opts, /*phase1=*/true);
      if (out == RunLimit) {
        res.status = SolveStatus::IterationLimit;
        res.iterations = iters_;
        return res;
      }
      double bscale = 1.0;
      for (int i = 0; i < m_; ++i) bscale = std::max(bscale, std::fabs(b_[i]));
      double violation = 0.0;
      for (int j = 0; j < ntot_; ++j) {
        const double v = vstat_[j] == Basic ? xb_[where_[j]] : val_[j];
        if (lo_[j] > -kInfinity) violation = std::max(violation, lo_[j] - v);
        if (hi_[j] < kInfinity) violation = std::max(violation, v - hi_[j]);
      }
      if (violation > ftol * bscale * 10.0) {
        res.status = SolveStatus::Infeasible;
        res.iterations = iters_;
        return res;
      }
      // Snap leftover nonbasic values onto true bounds.
      for (int j = 0; j < ntot_; ++j) {
        if (vstat_[j] == Basic) continue;
        if (lo_[j] > -kInfinity && std::fabs(val_[j] - lo_[j]) <= ftol * 10.0) {
          shift_nonbasic(j, lo_[j], AtLower);
        } else if (hi_[j] < kInfinity && std::fabs(val_[j] - hi_[j]) <= ftol * 10.0) {
          shift_nonbasic(j, hi_[j], AtUpper);
        } else if (lo_[j] == -kInfinity && hi_[j] == kInfinity) {
          vstat_[j] = FreeNB;
        } else {
          const double target_val = nearest_bound(j);
          shift_nonbasic(j, target_val, target_val == lo_[j] ? AtLower : AtUpper);
        }
      }
    }

    const RunOutcome out = run_phase(cost_, lo_, hi_, opts, /*phase1=*/false);
    res.iterations = iters_;
    if (out == RunLimit) {
      res.status = SolveStatus::IterationLimit;
      extract_solution(res);
      return res;
    }
    if (out == RunUnbounded) {
      res.status = SolveStatus::Unbounded;
      return res;
    }
    res.status = SolveStatus::Optimal;
    extract_solution(res);
    res.has_solution = true;
    res.duals.resize(m_);
    for (int i = 0; i < m_; ++i) res.duals[i] = -redc_[n_ + i];
    return res;
  }

 private:
  enum VStat : std::uint8_t { Basic, AtLower, AtUpper, FreeNB };
  enum RunOutcome { RunOptimal, RunUnbounded, RunLimit };

  double nearest_bound(int j) const {
    if (lo_[j] == -kInfinity) return hi_[j];
    if (hi_[j] == kInfinity) return lo_[j];
    return val_[j] - lo_[j] <= hi_[j] - val_[j] ? lo_[j] : hi_[j];
  }

  void shift_nonbasic(int j, double target_val, std::uint8_t stat) {
    const double shift = target_val - val_[j];
    if (shift != 0.0) {
      for (int i = 0; i < m_; ++i) xb_[i] -= shift * tab_(i, j);
    }
    val_[j] = target_val;
    vstat_[j] = stat;
  }

  void compute_reduced_costs(const Vec& cost) {
    redc_ = cost;
    for (int i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = tab_.row(i);
      for (int j = 0; j < ntot_; ++j) redc_[j] -= cb * row[j];
    }
    for (int i = 0; i < m_; ++i) redc_[basis_[i]] = 0.0;
  }

  // Drops the phase-1 charge and working bounds of variable k once its value
  // is back inside the true range. Returns true when a full reduced-cost
  // refresh is required (the restored variable was basic).
  bool maybe_restore(int k, Vec& cost, Vec& lo, Vec& hi) {
    if (cost[k] == 0.0) return false;
    const double v = vstat_[k] == Basic ? xb_[where_[k]] : val_[k];
    if (lo_[k] > -kInfinity && v < lo_[k] - 1e-9) return false;
    if (hi_[k] < kInfinity && v > hi_[k] + 1e-9) return false;
    const double old_cost = cost[k];
    cost[k] = 0.0;
    lo[k] = lo_[k];
    hi[k] = hi_[k];
    if (vstat_[k] != Basic) {
      if (lo_[k] > -kInfinity && std::fabs(v - lo_[k]) <= 1e-7) {
        shift_nonbasic(k, lo_[k], AtLower);
      } else if (hi_[k] < kInfinity && std::fabs(v - hi_[k]) <= 1e-7) {
        shift_nonbasic(k, hi_[k], AtUpper);
      }
      redc_[k] -= old_cost;
      return false;
    }
    return true;
  }

  RunOutcome run_phase(Vec& cost, Vec& lo, Vec& hi, const LpOptions& opts,
                       bool phase1) {
    compute_reduced_costs(cost);
    const double dtol = std::max(1e-9, 1e-12 * (phase1 ? 1.0 : cost_scale_));
    bool polished = false;
    Vec col(m_);
    while (true) {
      if (iters_ >= opts.max_iters) return RunLimit;

      // Pricing.
      int enter = -1;
      double best_score = dtol;
      for (int j = 0; j < ntot_; ++j) {
        if (vstat_[j] == Basic || lo[j] == hi[j]) continue;
        const double d = redc_[j];
        double score = 0.0;
        if (vstat_[j] == AtLower && d < -dtol) score = -d;
        else if (vstat_[j] == AtUpper && d > dtol) score = d;
        else if (vstat_[j] == FreeNB && std::fabs(d) > dtol) score = std::fabs(d);
        else continue;
        if (bland_) { enter = j; break; }
        if (score > best_score) {
          best_score = score;
          enter = j;
        }
      }
      if (enter < 0) {
        // Long runs accumulate tableau drift; refresh once and re-price
        // before accepting optimality.
        if (!phase1 && !polished && iters_ > 1000) {
          polished = true;
          if (refactor()) {
            compute_reduced_costs(cost);
            continue;
          }
        }
        return RunOptimal;
      }

      const double d_enter = redc_[enter];
      const double sigma = (vstat_[enter] == AtUpper || (vstat_[enter] == FreeNB && d_enter > 0))
                               ? -1.0 : 1.0;
      for (int i = 0; i < m_; ++i) col[i] = tab_(i, enter);

      // Ratio test: entering moves by t >= 0 in direction sigma.
      double t_best = kInfinity;
      if (lo[enter] > -kInfinity && hi[enter] < kInfinity) t_best = hi[enter] - lo[enter];
      int leave_row = -1;
      double leave_pivot = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double step = sigma * col[i];  // basic i changes by -step * t
        if (std::fabs(step) <= 1e-11) continue;
        const int k = basis_[i];
        double t_i;
        if (step > 0.0) {
          if (lo[k] == -kInfinity) continue;
          t_i = (xb_[i] - lo[k]) / step;
        } else {
          if (hi[k] == kInfinity) continue;
          t_i = (hi[k] - xb_[i]) / (-step);
        }
        if (t_i < 0.0) t_i = 0.0;
        bool take = false;
        if (t_i < t_best - 1e-12) {
          take = true;
        } else if (t_i < t_best + 1e-12 && leave_row >= 0) {
          // Tied leaving candidates: biggest pivot for stability, lowest
          // variable index to stay deterministic (index only under Bland).
          if (bland_) {
            take = basis_[i] < basis_[leave_row];
          } else {
            take = std::fabs(col[i]) > std::fabs(leave_pivot) + 1e-12 ||
                   (std::fabs(col[i]) >= std::fabs(leave_pivot) - 1e-12 &&
                    basis_[i] < basis_[leave_row]);
          }
        }
        if (take) {
          if (t_i < t_best) t_best = t_i;
          leave_row = i;
          leave_pivot = col[i];
        }
      }

      if (t_best == kInfinity) return phase1 ? RunLimit : RunUnbounded;

      ++iters_;
      if (t_best <= 1e-10) {
        if (++degen_run_ > 200 + m_) bland_ = true;
      } else {
        degen_run_ = 0;
        bland_ = false;
      }

      if (leave_row < 0) {
        // Entering variable flips to its opposite bound; basis unchanged.
        for (int i = 0; i < m_; ++i) xb_[i] -= sigma * t_best * col[i];
        val_[enter] = sigma > 0 ? hi[enter] : lo[enter];
        vstat_[enter] = sigma > 0 ? AtUpper : AtLower;
        if (phase1) restore_in_range(cost, lo, hi);
        continue;
      }

      const double pivot = col[leave_row];
      if (std::fabs(pivot) < 1e-9) {
        // Numerically unsafe pivot: refresh the tableau once, else give up.
        if (!refactor()) return RunLimit;
        compute_reduced_costs(cost);
        continue;
      }

      const double enter_start = val_[enter];
      for (int i = 0; i < m_; ++i)
        if (i != leave_row) xb_[i] -= sigma * t_best * col[i];

      const int leaving = basis_[leave_row];
      const double leave_step = sigma * pivot;
      vstat_[leaving] = leave_step > 0 ? AtLower : AtUpper;
      val_[leaving] = leave_step > 0 ? lo[leaving] : hi[leaving];
      where_[leaving] = -1;

      double* prow = tab_.row(leave_row);
      const double inv = 1.0 / pivot;
      for (int j = 0; j < ntot_; ++j) prow[j] *= inv;
      prow[enter] = 1.0;
      for (int i = 0; i < m_; ++i) {
        if (i == leave_row) continue;
        double* row = tab_.row(i);
        const double f = row[enter];
        if (f == 0.0) continue;
        for (int j = 0; j < ntot_; ++j) row[j] -= f * prow[j];
        row[enter] = 0.0;
      }
      {
        const double f = redc_[enter];
        if (f != 0.0) {
          for (int j = 0; j < ntot_; ++j) redc_[j] -= f * prow[j];
        }
        redc_[enter] = 0.0;
      }

      basis_[leave_row] = enter;
      where_[enter] = leave_row;
      vstat_[enter] = Basic;
      xb_[leave_row] = enter_start + sigma * t_best;

      if (phase1) restore_in_range(cost, lo, hi);

      if (iters_ % 4096 == 0) {
        refactor();
        compute_reduced_costs(cost);
      }
    }
  }

  void restore_in_range(Vec& cost, Vec& lo, Vec& hi) {
    bool full_refresh = false;
    for (int j = 0; j < ntot_; ++j)
      if (cost[j] != 0.0 && maybe_restore(j, cost, lo, hi)) full_refresh = true;
    if (full_refresh) compute_reduced_costs(cost);
  }

  bool refactor() {
    Matrix bmat(m_, m_);
    for (int i = 0; i < m_; ++i)
      for (int r = 0; r < m_; ++r) bmat(r, i) = a_(r, basis_[i]);
    // Gauss-Jordan inverse with partial pivoting.
    Matrix inv(m_, m_);
    for (int i = 0; i < m_; ++i) inv(i, i) = 1.0;
    for (int col = 0; col < m_; ++col) {
      int best = col;
      for (int i = col + 1; i < m_; ++i)
        if (std::fabs(bmat(i, col)) > std::fabs(bmat(best, col))) best = i;
      if (std::fabs(bmat(best, col)) < 1e-13) return false;
      if (best != col) {
        for (int j = 0; j < m_; ++j) {
          std::swap(bmat(col, j), bmat(best, j));
          std::swap(inv(col, j), inv(best, j));
        }
      }
      const double piv = 1.0 / bmat(col, col);
      for (int j = 0; j < m_; ++j) {
        bmat(col, j) *= piv;
        inv(col, j) *= piv;
      }
      for (int i = 0; i < m_; ++i) {
        if (i == col) continue;
        const double f = bmat(i, col);
        if (f == 0.0) continue;
        for (int j = 0; j < m_; ++j) {
          bmat(i, j) -= f * bmat(col, j);
          inv(i, j) -= f * inv(col, j);
        }
      }
    }
    // tab = inv * a
    Matrix fresh(m_, ntot_);
    for (int i = 0; i < m_; ++i) {
      double* out = fresh.row(i);
      for (int k = 0; k < m_; ++k) {
        const double f = inv(i, k);
        if (f == 0.0) continue;
        const double* src = a_.row(k);
        for (int j = 0; j < ntot_; ++j) out[j] += f * src[j];
      }
    }
    tab_ = std::move(fresh);
    // xb = B^-1 (b - A_N v_N)
    Vec rhs(m_);
    for (int i = 0; i < m_; ++i) {
      double acc = b_[i];
      const double* row = a_.row(i);
      for (int j = 0; j < ntot_; ++j)
        if (vstat_[j] != Basic && val_[j] != 0.0) acc -= row[j] * val_[j];
      rhs[i] = acc;
    }
    for (int i = 0; i < m_; ++i) {
      double acc = 0.0;
      const double* row = inv.row(i);
      for (int k = 0; k < m_; ++k) acc += row[k] * rhs[k];
      xb_[i] = acc;
    }
    return true;
  }

  void extract_solution(SolveResult& res) {
    res.x.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
      double v = vstat_[j] == Basic ? xb_[where_[j]] : val_[j];
      if (lo_[j] > -kInfinity && std::fabs(v - lo_[j]) < 1e-9) v = lo_[j];
      if (hi_[j] < kInfinity && std::fabs(v - hi_[j]) < 1e-9) v = hi_[j];
      res.x[j] = v;
    }
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += obj_sign_ * cost_[j] * res.x[j];
    res.objective = obj + offset_;
    res.has_solution = true;
  }

  int n_, m_, ntot_;
  Matrix a_;
  Vec b_, slack_lo_, slack_hi_, cost_;
  Vec default_lo_, default_hi_;
  double offset_ = 0.0, obj_sign_ = 1.0, cost_scale_ = 1.0;

  // per-solve state
  Matrix tab_;
  std::vector<int> basis_, where_;
  std::vector<std::uint8_t> vstat_;
  Vec val_, xb_, lo_, hi_, redc_;
  Vec work_lo_, work_hi_, p1cost_;
  long iters_ = 0;
  int degen_run_ = 0;
  bool bland_ = false;
};

}  // namespace detail

/// Solves a pure LP (no integrality flags may be set).
inline SolveResult solve_lp(const LinearModel& model, LpOptions opts = {}) {
  if (model.has_integers())
    throw std::invalid_argument("solve_lp: model has integer variables; use solve_milp");
  detail::SimplexSolver solver(model);
  return solver.solve(opts);
}

}  // namespace wfplan
