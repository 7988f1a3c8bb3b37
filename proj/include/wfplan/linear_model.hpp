#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wfplan/linalg.hpp"

namespace wfplan {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal, GreaterEqual };
enum class ObjSense { Minimize, Maximize };

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

/// A generic linear / mixed-integer linear program: bounded (possibly
/// integral) variables, sparse linear rows, and one linear objective. This is
/// the only contract the solvers see; every planning model is lowered to it.
class LinearModel {
 public:
  struct VariableDef {
    double lower = 0.0;
    double upper = kInfinity;
    bool integral = false;
    std::string name;
  };
  struct Row {
    std::vector<std::pair<int, double>> coeffs;  // (variable index, coefficient)
    Relation rel = Relation::LessEqual;
    double rhs = 0.0;
    std::string name;
  };

  int add_variable(double lower, double upper, bool integral = false, std::string name = {}) {
    if (!(lower <= upper))
      throw std::invalid_argument("LinearModel: variable lower bound exceeds upper bound");
    if (std::isnan(lower) || std::isnan(upper))
      throw std::invalid_argument("LinearModel: variable bound is NaN");
    vars_.push_back({lower, upper, integral, std::move(name)});
    objective_.push_back(0.0);
    return static_cast<int>(vars_.size()) - 1;
  }

  void add_row(std::vector<std::pair<int, double>> coeffs, Relation rel, double rhs,
               std::string name = {}) {
    for (const auto& [j, v] : coeffs) {
      if (j < 0 || j >= static_cast<int>(vars_.size()))
        throw std::invalid_argument("LinearModel: row references undeclared variable");
      if (!std::isfinite(v)) throw std::invalid_argument("LinearModel: non-finite coefficient");
    }
    if (!std::isfinite(rhs)) throw std::invalid_argument("LinearModel: non-finite rhs");
    rows_.push_back({std::move(coeffs), rel, rhs, std::move(name)});
  }

  void set_objective(ObjSense sense, Vec coeffs, double offset = 0.0) {
    if (coeffs.size() != vars_.size())
      throw std::invalid_argument("LinearModel: objective length mismatch");
    sense_ = sense;
    objective_ = std::move(coeffs);
    offset_ = offset;
  }

  void set_objective_coeff(int var, double value) { objective_.at(var) = value; }
  void set_objective_sense(ObjSense sense) { sense_ = sense; }
  void set_objective_offset(double offset) { offset_ = offset; }

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const std::vector<VariableDef>& variables() const { return vars_; }
  const std::vector<Row>& rows() const { return rows_; }
  const Vec& objective() const { return objective_; }
  double objective_offset() const { return offset_; }
  ObjSense sense() const { return sense_; }

  bool has_integers() const {
    for (const auto& v : vars_)
      if (v.integral) return true;
    return false;
  }

  /// Deterministic plain-text listing, one declaration per line:
  ///   minimize|maximize <coeff>*x<j> ... [+ <offset>]
  ///   subject to: <name>: <coeff>*x<j> ... <=|=|>= <rhs>
  ///   bounds: <lower> <= x<j> <= <upper> [integer]
  /// Intended for debugging and golden tests, not for any external solver.
  std::string dump() const {
    std::ostringstream out;
    out.precision(12);
    out << (sense_ == ObjSense::Minimize ? "minimize" : "maximize");
    for (std::size_t j = 0; j < objective_.size(); ++j)
      if (objective_[j] != 0.0) out << " " << signed_term(objective_[j], j);
    if (offset_ != 0.0) out << " + " << offset_;
    out << "\nsubject to\n";
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      out << "  " << (rows_[i].name.empty() ? "r" + std::to_string(i) : rows_[i].name) << ":";
      for (const auto& [j, v] : rows_[i].coeffs) out << " " << signed_term(v, j);
      switch (rows_[i].rel) {
        case Relation::LessEqual: out << " <= "; break;
        case Relation::Equal: out << " = "; break;
        case Relation::GreaterEqual: out << " >= "; break;
      }
      out << rows_[i].rhs << "\n";
    }
    out << "bounds\n";
    for (std::size_t j = 0; j < vars_.size(); ++j) {
      out << "  " << vars_[j].lower << " <= " << var_name(j) << " <= ";
      if (vars_[j].upper == kInfinity)
        out << "inf";
      else
        out << vars_[j].upper;
      if (vars_[j].integral) out << " integer";
      out << "\n";
    }
    return out.str();
  }

  std::string var_name(std::size_t j) const {
    return vars_[j].name.empty() ? "x" + std::to_string(j) : vars_[j].name;
  }

 private:
  std::string signed_term(double v, std::size_t j) const {
    std::ostringstream t;
    t.precision(12);
    t << (v < 0 ? "- " : "+ ") << std::fabs(v) << "*" << var_name(j);
    return t.str();
  }

  std::vector<VariableDef> vars_;
  std::vector<Row> rows_;
  Vec objective_;
  double offset_ = 0.0;
  ObjSense sense_ = ObjSense::Minimize;
};

/// Outcome of one LP or MILP solve.
struct SolveResult {
  SolveStatus status = SolveStatus::IterationLimit;
  Vec x;               // primal solution (incumbent for IterationLimit)
  double objective = 0.0;
  double gap = 0.0;    // certified absolute gap (MILP); 0 for exact LP optima
  Vec duals;           // LP only: row multipliers c_B B^-1
  long iterations = 0; // simplex pivots or branch-and-bound nodes
  bool has_solution = false;
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

}  // namespace wfplan
